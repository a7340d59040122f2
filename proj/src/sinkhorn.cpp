#include "qsink/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qsink {

namespace {

constexpr double kStrictPositivityFloor = 1e-12;
constexpr double kUpsilonTolerance = 1e-9;

std::vector<ComplexMatrix> positivity_probes() {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  const std::vector<std::vector<cplx>> kets = {
      {1.0, 0.0}, {0.0, 1.0}, {r, r}, {r, -r}, {r, i * r}, {r, -i * r}};
  std::vector<ComplexMatrix> probes;
  for (const auto& ket : kets) {
    probes.push_back(ComplexMatrix::outer(ket));
  }
  probes.push_back(ComplexMatrix::identity(2) * cplx(0.5));
  return probes;
}

bool strictly_positive_on_probes(const PauliTransferMatrix& ptm) {
  for (const auto& probe : positivity_probes()) {
    if (!(hermitian_eigenvalues(apply(ptm, probe)).back() > kStrictPositivityFloor)) {
      return false;
    }
  }
  return true;
}

ComplexMatrix diag2(double h, double v) { return ComplexMatrix::diagonal({h, v}); }

} // namespace

ComplexMatrix sinkhorn_fixed_point_map(const PauliTransferMatrix& ptm, const ComplexMatrix& s) {
  const ComplexMatrix inner = pd_inverse(apply(dual(ptm), s));
  return pd_inverse(apply(ptm, inner));
}

ComplexMatrix fixed_point_iterate(const PauliTransferMatrix& ptm, double tol, int max_iter) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("fixed_point_iterate: tolerance must be positive");
  }
  if (max_iter < 1) {
    throw std::invalid_argument("fixed_point_iterate: max_iter must be at least 1");
  }
  const bool strictly_positive = strictly_positive_on_probes(ptm);

  ComplexMatrix s = ComplexMatrix::identity(2);
  for (int iter = 0; iter < max_iter; ++iter) {
    ComplexMatrix next;
    try {
      next = sinkhorn_fixed_point_map(ptm, s);
    } catch (const std::domain_error& e) {
      if (!strictly_positive) {
        throw NotStrictlyPositiveError(std::string("map is not strictly positive: ") + e.what());
      }
      throw;
    }
    if (max_abs_diff(next, s) <= tol) {
      return s;
    }
    // A fixed point is only guaranteed for strictly positive maps.
    if (!strictly_positive) {
      throw NotStrictlyPositiveError(
          "map is not strictly positive and S = I is not a fixed point");
    }
    s = next * cplx(2.0 / next.trace().real());
  }
  throw ConvergenceError("Sinkhorn fixed-point iteration did not converge within " +
                         std::to_string(max_iter) + " iterations");
}

double closed_form_s(const AbcdCoefficients& k) {
  const double sum = k.a + k.d;
  if (sum - 2.0 * std::abs(k.b) < -1e-12 * std::max(1.0, sum)) {
    throw std::domain_error("closed_form_s: coefficients violate a + d >= 2|b|");
  }
  if (std::abs(k.b) <= 1e-14 * sum) {
    return 0.0;
  }
  return -2.0 * k.b / (sum + k.radical);
}

std::array<double, 2> b_diagonal(const AbcdCoefficients& k, double s) {
  const double mu_h = k.a + k.b + s * (k.b + k.d);
  const double mu_v = k.a - k.b + s * (k.b - k.d);
  if (!(mu_h > 0.0) || !(mu_v > 0.0)) {
    throw std::domain_error("B is degenerate: L^dag[S] has a non-positive eigenvalue");
  }
  return {1.0 / std::sqrt(mu_h), 1.0 / std::sqrt(mu_v)};
}

UnitalParameters unital_parameters(const AbcdCoefficients& k) {
  const double denom = k.a - k.d + k.radical;
  if (!(denom > 0.0)) {
    throw std::domain_error("unital_parameters: a - d + sqrt((a+d)^2 - 4b^2) must be positive");
  }
  const double lx = 2.0 * k.c / denom;
  // lz <= lx holds exactly for this family; equality at b = 0 can lose an ulp.
  return {lx, lx, std::min(lx, 4.0 * k.det / (denom * denom))};
}

UnitalParameters unital_parameters(const ChannelParams& params, double t) {
  params.validate();
  if (!(t >= 0.0)) {
    throw std::invalid_argument("unital_parameters: time must be non-negative");
  }
  if (t == 0.0) {
    return {};
  }
  const double big_gamma = std::hypot(params.gamma, params.gamma_h - params.gamma_v);
  const double h = 0.5 * big_gamma * t;
  double u = 0.0;
  if (params.gamma > 0.0) {
    u = big_gamma * t < 1e-6 ? params.gamma * 0.5 * t * (1.0 + h * h / 6.0)
                             : params.gamma * std::sinh(h) / big_gamma;
  }
  const double w = u + std::sqrt(1.0 + u * u);
  const double lx = std::exp(-0.5 * params.gamma * t) / w;
  return {lx, lx, std::min(lx, 1.0 / (w * w))};
}

SinkhornDecomposition decompose(const ChannelParams& params, double t) {
  params.validate();
  if (!(t >= 0.0)) {
    throw std::invalid_argument("decompose: time must be non-negative");
  }
  SinkhornDecomposition out;
  if (t == 0.0) {
    return out;
  }
  const AbcdCoefficients k = abcd(params, t);
  out.s = closed_form_s(k);
  out.a_op = diag2(std::sqrt(1.0 + out.s), std::sqrt(1.0 - out.s));
  const auto bd = b_diagonal(k, out.s);
  out.b_op = diag2(bd[0], bd[1]);
  out.upsilon = compose(sandwich(out.a_op), compose(ptm_at(params, t), sandwich(out.b_op)));

  const UnitalParameters lam = unital_parameters(k);
  out.lambda_x = lam.lambda_x;
  out.lambda_y = lam.lambda_y;
  out.lambda_z = lam.lambda_z;

  const auto expected = PauliTransferMatrix::diagonal(1.0, lam.lambda_x, lam.lambda_y, lam.lambda_z);
  const double deviation = max_abs_diff(out.upsilon, expected);
  if (!(deviation <= kUpsilonTolerance)) {
    throw std::logic_error("Sinkhorn normal form deviates from diag(1, lx, ly, lz) by " +
                           std::to_string(deviation));
  }
  return out;
}

PauliTransferMatrix reconstruct(const SinkhornDecomposition& d) {
  return compose(sandwich(pd_inverse(d.a_op)), compose(d.upsilon, sandwich(pd_inverse(d.b_op))));
}

} // namespace qsink
