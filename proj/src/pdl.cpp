#include "qsink/pdl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsink {

namespace {

// Below this value of Gamma*t the hyperbolic ratios are replaced by their
// second-order series.
constexpr double kSeriesThreshold = 1e-6;
constexpr double kMaxSteps = 1e7;

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time must be finite and non-negative, got " + std::to_string(t));
  }
}

// Right-hand side of the master equation, evaluated literally.
ComplexMatrix lindblad_rhs(const ChannelParams& p, const ComplexMatrix& rho) {
  const ComplexMatrix loss = ComplexMatrix::diagonal({p.gamma_h, p.gamma_v});
  ComplexMatrix out = (loss * rho + rho * loss) * cplx(-0.5);
  for (std::size_t k = 1; k <= 3; ++k) {
    const ComplexMatrix& s = pauli::sigma(k);
    out += (s * rho * s - rho) * cplx(p.gamma / 4.0);
  }
  return out;
}

using Block = std::array<cplx, 16>; // 4x4 row-major

Block multiply(const Block& a, const Block& b) {
  Block out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      const cplx aik = a[i * 4 + k];
      for (std::size_t j = 0; j < 4; ++j) {
        out[i * 4 + j] += aik * b[k * 4 + j];
      }
    }
  }
  return out;
}

// Generator acting on row-major vec(rho); column (2i+j) is vec(rhs(|i><j|)).
Block generator(const ChannelParams& p) {
  Block g{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexMatrix unit(2);
      unit(i, j) = 1.0;
      const ComplexMatrix image = lindblad_rhs(p, unit);
      for (std::size_t r = 0; r < 4; ++r) {
        g[r * 4 + (2 * i + j)] = image(r / 2, r % 2);
      }
    }
  }
  return g;
}

// One classical RK4 step of dX/dt = G X.
void rk4_step(const Block& gen, Block& x, double h) {
  const Block k1 = multiply(gen, x);
  Block tmp;
  for (std::size_t n = 0; n < 16; ++n) tmp[n] = x[n] + 0.5 * h * k1[n];
  const Block k2 = multiply(gen, tmp);
  for (std::size_t n = 0; n < 16; ++n) tmp[n] = x[n] + 0.5 * h * k2[n];
  const Block k3 = multiply(gen, tmp);
  for (std::size_t n = 0; n < 16; ++n) tmp[n] = x[n] + h * k3[n];
  const Block k4 = multiply(gen, tmp);
  for (std::size_t n = 0; n < 16; ++n) {
    x[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
  }
}

PauliTransferMatrix read_ptm(const Block& x) {
  PauliTransferMatrix m;
  for (std::size_t j = 0; j < 4; ++j) {
    ComplexMatrix image(2);
    for (std::size_t r = 0; r < 4; ++r) {
      image(r / 2, r % 2) = x[r * 4 + j];
    }
    for (std::size_t i = 0; i < 4; ++i) {
      m(i, j) = 0.5 * (pauli::sigma(i) * image).trace().real();
    }
  }
  return m;
}

} // namespace

void ChannelParams::validate() const {
  for (double rate : {gamma_h, gamma_v, gamma}) {
    if (!std::isfinite(rate) || rate < 0.0) {
      throw std::invalid_argument("channel rates must be finite and non-negative (gamma_h=" +
                                  std::to_string(gamma_h) + ", gamma_v=" +
                                  std::to_string(gamma_v) + ", gamma=" + std::to_string(gamma) +
                                  ")");
    }
  }
}

double ChannelParams::max_rate() const noexcept { return std::max({gamma_h, gamma_v, gamma}); }

AbcdCoefficients AbcdCoefficients::from_entries(double a, double b, double c, double d, double t) {
  const double lo = a + d - 2.0 * std::abs(b);
  if (lo < 0.0) {
    throw std::domain_error("coefficients violate a + d >= 2|b|");
  }
  return {a, b, c, d, t, std::sqrt(lo * (a + d + 2.0 * std::abs(b))), a * d - b * b};
}

AbcdCoefficients abcd(const ChannelParams& params, double t) {
  params.validate();
  require_time(t);
  const double total = params.total_rate();
  const double skew = params.gamma_h - params.gamma_v;
  const double big_gamma = std::hypot(params.gamma, skew);
  const double envelope = std::exp(-0.5 * total * t);

  // envelope*cosh(Gamma t/2) and envelope*sinh(Gamma t/2)/Gamma. total >= Gamma,
  // so the exponential forms never overflow.
  double e_cosh = 0.0;
  double e_sinhc = 0.0;
  if (big_gamma * t < kSeriesThreshold) {
    const double h2 = 0.25 * big_gamma * big_gamma * t * t;
    e_cosh = envelope * (1.0 + 0.5 * h2);
    e_sinhc = envelope * 0.5 * t * (1.0 + h2 / 6.0);
  } else {
    const double slow = std::exp(-0.5 * (total - big_gamma) * t);
    e_cosh = 0.5 * slow * (1.0 + std::exp(-big_gamma * t));
    e_sinhc = -slow * std::expm1(-big_gamma * t) / (2.0 * big_gamma);
  }

  AbcdCoefficients k;
  k.t = t;
  k.a = e_cosh + params.gamma * e_sinhc;
  k.b = -skew * e_sinhc;
  k.c = std::exp(-0.5 * (2.0 * params.gamma + params.gamma_h + params.gamma_v) * t);
  k.d = e_cosh - params.gamma * e_sinhc;
  // (a+d)^2 - 4b^2 = 4 E^2 (1 + gamma^2 sinh^2/Gamma^2) and ad - b^2 = E^2.
  k.radical = 2.0 * std::hypot(envelope, params.gamma * e_sinhc);
  k.det = envelope * envelope;
  return k;
}

PauliTransferMatrix ptm_at(const ChannelParams& params, double t) {
  const AbcdCoefficients k = abcd(params, t);
  PauliTransferMatrix m = PauliTransferMatrix::diagonal(k.a, k.c, k.c, k.d);
  m(0, 3) = k.b;
  m(3, 0) = k.b;
  return m;
}

double default_integration_step(const ChannelParams& params, double t) {
  const double rate = params.max_rate();
  const double dt = rate > 0.0 ? 1e-4 / rate : 1e-4;
  return std::max(dt, t / kMaxSteps);
}

std::vector<PauliTransferMatrix> ptm_trajectory_via_integration(const ChannelParams& params,
                                                                std::span<const double> times,
                                                                double dt) {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("integration step must be positive, got " + std::to_string(dt));
  }
  const Block gen = generator(params);

  Block x{};
  for (std::size_t j = 0; j < 4; ++j) {
    const ComplexMatrix& s = pauli::sigma(j);
    for (std::size_t r = 0; r < 4; ++r) {
      x[r * 4 + j] = s(r / 2, r % 2);
    }
  }

  std::vector<PauliTransferMatrix> out;
  out.reserve(times.size());
  double now = 0.0;
  for (double target : times) {
    require_time(target);
    if (target < now) {
      throw std::invalid_argument("integration checkpoints must be ascending");
    }
    const double span = target - now;
    if (span > 0.0) {
      const double steps = std::ceil(span / dt);
      if (steps > kMaxSteps) {
        throw std::invalid_argument("integration would need more than 1e7 steps");
      }
      const auto count = static_cast<long>(steps);
      const double h = span / static_cast<double>(count);
      for (long n = 0; n < count; ++n) {
        rk4_step(gen, x, h);
      }
    }
    now = target;
    out.push_back(read_ptm(x));
  }
  return out;
}

PauliTransferMatrix ptm_via_integration(const ChannelParams& params, double t, double dt) {
  const double times[] = {t};
  return ptm_trajectory_via_integration(params, times, dt).front();
}

double detection_probability(const PauliTransferMatrix& ptm, const ComplexMatrix& rho) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("detection_probability: expected a qubit density operator");
  }
  const ComplexMatrix h = hermitian_part_checked(rho);
  if (std::abs(h.trace().real() - 1.0) > 1e-10) {
    throw std::invalid_argument("detection_probability: state must have unit trace");
  }
  if (hermitian_eigenvalues(h).back() < -kPsdTolerance) {
    throw std::invalid_argument("detection_probability: state is not positive semidefinite");
  }
  return apply(ptm, h).trace().real();
}

} // namespace qsink
