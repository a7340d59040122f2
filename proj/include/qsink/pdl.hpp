#pragma once

// Depolarization combined with polarization-dependent loss on a single
// polarization qubit, |H> = |0>, |V> = |1>:
//
//   d rho/dt = -1/2 {gamma_H |H><H| + gamma_V |V><V|, rho}
//              + gamma/4 sum_k (sigma_k rho sigma_k - rho)
//
// The generated semigroup has the Pauli transfer matrix
//
//        | a 0 0 b |
//   M =  | 0 c 0 0 |
//        | 0 0 c 0 |
//        | b 0 0 d |
//
// with closed-form a, b, c, d. The Runge-Kutta integrator below is an
// independent route to the same matrix and serves as the reference.

#include "qsink/channel.hpp"

#include <span>
#include <vector>

namespace qsink {

/// Rates of one communication line, in arbitrary reciprocal-time units.
struct ChannelParams {
  double gamma_h = 0.0; ///< attenuation rate of |H>
  double gamma_v = 0.0; ///< attenuation rate of |V>
  double gamma = 0.0;   ///< depolarization rate

  /// Throws std::invalid_argument unless all rates are finite and >= 0.
  void validate() const;
  double total_rate() const noexcept { return gamma_h + gamma_v + gamma; }
  double max_rate() const noexcept;

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// Entries of M(t). `radical` = sqrt((a+d)^2 - 4b^2) and `det` = ad - b^2 are
/// kept alongside because both cancel catastrophically when formed from the
/// entries at long times; abcd() evaluates them in closed form.
struct AbcdCoefficients {
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  double d = 1.0;
  double t = 0.0;
  double radical = 2.0;
  double det = 1.0;

  /// Builds the record from bare entries, deriving radical and det directly.
  /// Throws std::domain_error if a + d < 2|b|.
  static AbcdCoefficients from_entries(double a, double b, double c, double d, double t = 0.0);
};

AbcdCoefficients abcd(const ChannelParams& params, double t);

PauliTransferMatrix ptm_at(const ChannelParams& params, double t);

/// Reference PTM from classical RK4 integration of the master equation,
/// started from the four Pauli operators. The step is shrunk so that it
/// divides t evenly; more than 1e7 steps is rejected.
PauliTransferMatrix ptm_via_integration(const ChannelParams& params, double t, double dt);

/// Same integration, reading off the PTM at every requested time (ascending)
/// in a single pass. Each segment between checkpoints uses steps <= dt.
std::vector<PauliTransferMatrix> ptm_trajectory_via_integration(const ChannelParams& params,
                                                                std::span<const double> times,
                                                                double dt);

/// 1e-4 / max-rate (1e-4 for a noiseless line), enlarged if needed so that
/// reaching `t` takes at most 1e7 steps.
double default_integration_step(const ChannelParams& params, double t);

/// tr[L(rho)] for a density operator rho.
double detection_probability(const PauliTransferMatrix& ptm, const ComplexMatrix& rho);

} // namespace qsink
