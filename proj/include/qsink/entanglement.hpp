#pragma once

// Two-qubit entanglement under local trace-decreasing noise: negativity and
// the PPT test, postselected (conditional) output states, the maximal
// entanglement lifetime and the initial state that attains it.

#include "qsink/channel.hpp"
#include "qsink/pdl.hpp"
#include "qsink/sinkhorn.hpp"

#include <array>
#include <optional>
#include <utility>

namespace qsink {

/// A possibly subnormalized two-qubit density operator, basis |HH>, |HV>, |VH>, |VV>.
class TwoQubitState {
public:
  /// Validates Hermiticity (1e-10), positivity (-1e-9) and 0 < tr <= 1 + 1e-12.
  /// Throws std::invalid_argument otherwise.
  explicit TwoQubitState(const ComplexMatrix& rho);

  static TwoQubitState pure(const std::array<cplx, 4>& psi);

  const ComplexMatrix& rho() const noexcept { return rho_; }
  double trace() const noexcept { return trace_; }
  bool normalized() const noexcept { return normalized_; }
  TwoQubitState normalize() const;

private:
  ComplexMatrix rho_;
  double trace_ = 1.0;
  bool normalized_ = true;
};

/// (|HH> + |VV>)/sqrt(2).
std::array<cplx, 4> psi_plus();

/// 1/2 (||rho^{T_2}||_1 - 1) of the normalized state, computed as the sum of
/// |negative eigenvalues| of the partial transpose and clamped at zero.
double negativity(const TwoQubitState& state);

inline constexpr double kEntanglementThreshold = 1e-10;

bool is_entangled(const TwoQubitState& state);

struct ConditionalState {
  TwoQubitState state;
  double detection_probability;
};

/// (L1 (x) L2)[rho] / tr[(L1 (x) L2)[rho]] together with the trace. Throws
/// std::domain_error when the detection probability is at most 1e-14.
ConditionalState conditional_state(const PauliTransferMatrix& ptm1,
                                   const PauliTransferMatrix& ptm2,
                                   const TwoQubitState& initial);

/// g(t) = lx lx' + ly ly' + lz lz' - 1 for the Sinkhorn normal forms of both lines.
double lifetime_lhs(const ChannelParams& line1, const ChannelParams& line2, double t);

struct LifetimeResult {
  std::optional<double> tau; ///< empty: no sign change of g up to t_max
  std::pair<double, double> bracket{0.0, 0.0};
  double residual = 0.0; ///< g(tau), or g(t_max) when no root was found
  int iterations = 0;
  double lhs_at_zero = 2.0;
  /// g changed sign again somewhere on [tau, 4 tau].
  bool sign_reversal = false;
};

/// 1 / (sum of all six rates); infinity for two noiseless lines.
double lifetime_initial_step(const ChannelParams& line1, const ChannelParams& line2);

/// 1e3 times the initial step.
double default_lifetime_horizon(const ChannelParams& line1, const ChannelParams& line2);

/// First root of g: doubling from the initial step until g < 0 (or t_max is
/// passed), then bisection to |g| <= 1e-10 or a bracket width <= 1e-12.
LifetimeResult max_lifetime(const ChannelParams& line1, const ChannelParams& line2, double t_max);

struct OptimalState {
  std::array<cplx, 4> psi;
  ComplexMatrix rho;
  std::pair<double, double> schmidt_coefficients; ///< descending
  std::array<double, 2> b_diagonal_1;             ///< B(tau) entries, line 1
  std::array<double, 2> b_diagonal_2;             ///< B'(tau) entries, line 2
};

/// psi proportional to B(tau) (x) B'(tau) (|HH> + |VV>).
OptimalState optimal_state(const ChannelParams& line1, const ChannelParams& line2, double tau);

/// Most robust state against Pauli-diagonal unital noise with ordered
/// parameters lx >= ly >= lz >= 0 on both sides, which is psi_plus.
/// Unordered or negative parameters throw std::invalid_argument.
std::array<cplx, 4> robust_state_unital(const UnitalParameters& lam1, const UnitalParameters& lam2);

} // namespace qsink
