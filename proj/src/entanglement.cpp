#include "qsink/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qsink {

namespace {

constexpr double kRootResidual = 1e-10;
constexpr double kRootWidth = 1e-12;
constexpr int kMaxBisections = 200;
constexpr int kReversalSamples = 400;

} // namespace

TwoQubitState::TwoQubitState(const ComplexMatrix& rho) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("TwoQubitState: expected a 4x4 density operator");
  }
  rho_ = hermitian_part_checked(rho);
  const double smallest = hermitian_eigenvalues(rho_).back();
  if (smallest < -kPsdTolerance) {
    throw std::invalid_argument("TwoQubitState: operator is not positive semidefinite (min eigenvalue " +
                                std::to_string(smallest) + ")");
  }
  trace_ = rho_.trace().real();
  if (!(trace_ > 0.0) || trace_ > 1.0 + 1e-12) {
    throw std::invalid_argument("TwoQubitState: trace must lie in (0, 1], got " +
                                std::to_string(trace_));
  }
  normalized_ = std::abs(trace_ - 1.0) <= 1e-10;
}

TwoQubitState TwoQubitState::pure(const std::array<cplx, 4>& psi) {
  double norm2 = 0.0;
  for (const auto& z : psi) {
    norm2 += std::norm(z);
  }
  if (!(norm2 > 0.0)) {
    throw std::invalid_argument("TwoQubitState::pure: zero vector");
  }
  std::array<cplx, 4> unit = psi;
  for (auto& z : unit) {
    z /= std::sqrt(norm2);
  }
  return TwoQubitState(ComplexMatrix::outer(unit));
}

TwoQubitState TwoQubitState::normalize() const {
  return TwoQubitState(rho_ * cplx(1.0 / trace_));
}

std::array<cplx, 4> psi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return {r, 0.0, 0.0, r};
}

double negativity(const TwoQubitState& state) {
  const TwoQubitState unit = state.normalized() ? state : state.normalize();
  // tr = 1, so (||X||_1 - 1)/2 equals the total weight of negative eigenvalues.
  double negative_weight = 0.0;
  for (double lambda : hermitian_eigenvalues(partial_transpose_second(unit.rho()))) {
    if (lambda < 0.0) {
      negative_weight -= lambda;
    }
  }
  return negative_weight;
}

bool is_entangled(const TwoQubitState& state) {
  return negativity(state) > kEntanglementThreshold;
}

ConditionalState conditional_state(const PauliTransferMatrix& ptm1,
                                   const PauliTransferMatrix& ptm2,
                                   const TwoQubitState& initial) {
  if (!initial.normalized()) {
    throw std::invalid_argument("conditional_state: initial state must be normalized");
  }
  const ComplexMatrix out = apply_two_qubit(ptm1, ptm2, initial.rho());
  const double p = out.trace().real();
  if (!(p > 1e-14)) {
    throw std::domain_error("conditional_state: detection probability vanishes (" +
                            std::to_string(p) + ")");
  }
  return {TwoQubitState(out * cplx(1.0 / p)), p};
}

double lifetime_lhs(const ChannelParams& line1, const ChannelParams& line2, double t) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("lifetime_lhs: time must be non-negative");
  }
  const UnitalParameters l1 = unital_parameters(line1, t);
  const UnitalParameters l2 = unital_parameters(line2, t);
  return l1.lambda_x * l2.lambda_x + l1.lambda_y * l2.lambda_y + l1.lambda_z * l2.lambda_z - 1.0;
}

double lifetime_initial_step(const ChannelParams& line1, const ChannelParams& line2) {
  const double total = line1.total_rate() + line2.total_rate();
  return total > 0.0 ? 1.0 / total : std::numeric_limits<double>::infinity();
}

double default_lifetime_horizon(const ChannelParams& line1, const ChannelParams& line2) {
  return 1e3 * lifetime_initial_step(line1, line2);
}

LifetimeResult max_lifetime(const ChannelParams& line1, const ChannelParams& line2, double t_max) {
  line1.validate();
  line2.validate();
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("max_lifetime: t_max must be positive and finite");
  }
  const auto g = [&](double t) { return lifetime_lhs(line1, line2, t); };

  LifetimeResult result;
  result.lhs_at_zero = g(0.0);

  double lo = 0.0;
  double hi = std::min(lifetime_initial_step(line1, line2), t_max);
  double g_hi = g(hi);
  while (g_hi >= 0.0) {
    lo = hi;
    if (hi >= t_max) {
      result.bracket = {0.0, t_max};
      result.residual = g_hi;
      return result;
    }
    hi = std::min(2.0 * hi, t_max);
    g_hi = g(hi);
    ++result.iterations;
  }

  double tau = hi;
  double g_tau = g_hi;
  for (int n = 0; n < kMaxBisections; ++n) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    ++result.iterations;
    tau = mid;
    g_tau = g_mid;
    if (std::abs(g_mid) <= kRootResidual || hi - lo <= kRootWidth) {
      break;
    }
    (g_mid > 0.0 ? lo : hi) = mid;
  }
  result.tau = tau;
  result.bracket = {lo, hi};
  result.residual = g_tau;

  for (int k = 1; k <= kReversalSamples; ++k) {
    const double t = tau * (1.0 + 3.0 * k / kReversalSamples);
    if (g(t) > kRootResidual) {
      result.sign_reversal = true;
      break;
    }
  }
  return result;
}

std::array<cplx, 4> robust_state_unital(const UnitalParameters& lam1, const UnitalParameters& lam2) {
  // Equal parameters may come out one ulp apart.
  constexpr double slack = 1e-12;
  for (const auto& lam : {lam1, lam2}) {
    if (!(lam.lambda_x >= lam.lambda_y - slack && lam.lambda_y >= lam.lambda_z - slack &&
          lam.lambda_z >= -slack)) {
      throw std::invalid_argument(
          "robust_state_unital: only ordered parameters lx >= ly >= lz >= 0 are supported");
    }
  }
  return psi_plus();
}

OptimalState optimal_state(const ChannelParams& line1, const ChannelParams& line2, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("optimal_state: tau must be positive and finite");
  }
  const auto b_at = [tau](const ChannelParams& p) {
    const AbcdCoefficients k = abcd(p, tau);
    return b_diagonal(k, closed_form_s(k));
  };
  const auto seed =
      robust_state_unital(unital_parameters(line1, tau), unital_parameters(line2, tau));

  OptimalState out;
  out.b_diagonal_1 = b_at(line1);
  out.b_diagonal_2 = b_at(line2);

  // B and B' are diagonal, so B (x) B' only rescales the |HH> and |VV> amplitudes.
  const std::array<double, 4> scale = {out.b_diagonal_1[0] * out.b_diagonal_2[0],
                                       out.b_diagonal_1[0] * out.b_diagonal_2[1],
                                       out.b_diagonal_1[1] * out.b_diagonal_2[0],
                                       out.b_diagonal_1[1] * out.b_diagonal_2[1]};
  double norm2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    out.psi[i] = scale[i] * seed[i];
    norm2 += std::norm(out.psi[i]);
  }
  const double norm = std::sqrt(norm2);
  for (auto& z : out.psi) {
    z /= norm;
  }
  out.rho = ComplexMatrix::outer(out.psi);
  const double hh = std::abs(out.psi[0]);
  const double vv = std::abs(out.psi[3]);
  out.schmidt_coefficients = {std::max(hh, vv), std::min(hh, vv)};
  return out;
}

} // namespace qsink
