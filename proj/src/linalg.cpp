#include "qsink/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsink {

namespace {

constexpr double kJacobiTolerance = 1e-13;
constexpr int kJacobiMaxSweeps = 100;
constexpr double kPositiveDefiniteFloor = 1e-12;

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

double off_diagonal_norm(const ComplexMatrix& m) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (i != j) {
        sum += std::norm(m(i, j));
      }
    }
  }
  return std::sqrt(sum);
}

// Applies f to the spectrum of a Hermitian positive definite matrix.
template <typename Fn>
ComplexMatrix pd_spectral_function(const ComplexMatrix& m, Fn&& f) {
  const auto eig = hermitian_eigen(m);
  const double smallest = eig.eigenvalues.back();
  if (!(smallest > kPositiveDefiniteFloor)) {
    throw std::domain_error("matrix is not positive definite (smallest eigenvalue " +
                            std::to_string(smallest) + ")");
  }
  const std::size_t n = m.dim();
  ComplexMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.eigenvalues[k]);
    const auto& v = eig.eigenvectors[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += fk * v[i] * std::conj(v[j]);
      }
    }
  }
  return hermitian_part_checked(out);
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim_ * dim_) {
    throw std::invalid_argument("ComplexMatrix: expected " + std::to_string(dim_ * dim_) +
                                " entries, got " + std::to_string(data_.size()));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    m(i, i) = diag[i];
  }
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> v) {
  ComplexMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      m(i, j) = v[i] * std::conj(v[j]);
    }
  }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      out(j, i) = std::conj((*this)(i, j));
    }
  }
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      out(j, i) = (*this)(i, j);
    }
  }
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    t += (*this)(i, i);
  }
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) {
    m = std::max(m, std::abs(z));
  }
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) {
    s += std::norm(z);
  }
  return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_dim(*this, rhs, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += rhs.data_[i];
  }
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_dim(*this, rhs, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] -= rhs.data_[i];
  }
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
  for (auto& z : data_) {
    z *= scalar;
  }
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_same_dim(lhs, rhs, "operator*");
  const std::size_t n = lhs.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const cplx a = lhs(i, k);
      if (a == cplx{}) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += a * rhs(k, j);
      }
    }
  }
  return out;
}

std::vector<cplx> ComplexMatrix::apply(std::span<const cplx> v) const {
  if (v.size() != dim_) {
    throw std::invalid_argument("ComplexMatrix::apply: vector length mismatch");
  }
  std::vector<cplx> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      out[i] += (*this)(i, j) * v[j];
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  return (a - b).max_abs();
}

namespace pauli {

ComplexMatrix id() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }

const ComplexMatrix& sigma(std::size_t k) {
  static const ComplexMatrix basis[4] = {id(), x(), y(), z()};
  if (k > 3) {
    throw std::out_of_range("pauli::sigma: index must be 0..3");
  }
  return basis[k];
}

} // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t l = 0; l < nb; ++l) {
          out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
        }
      }
    }
  }
  return out;
}

ComplexMatrix partial_transpose_second(const ComplexMatrix& rho) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("partial_transpose_second: expected a 4x4 operator");
  }
  ComplexMatrix out(4);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 2; ++l) {
          out(2 * i + k, 2 * j + l) = rho(2 * i + l, 2 * j + k);
        }
      }
    }
  }
  return out;
}

ComplexMatrix hermitian_part_checked(const ComplexMatrix& m) {
  const ComplexMatrix adj = m.adjoint();
  const double asym = max_abs_diff(m, adj);
  if (asym > kHermitianTolerance * std::max(1.0, m.max_abs())) {
    throw std::invalid_argument("matrix is not Hermitian (||M - M^dag||_max = " +
                                std::to_string(asym) + ")");
  }
  ComplexMatrix h = (m + adj) * cplx(0.5);
  for (std::size_t i = 0; i < h.dim(); ++i) {
    h(i, i) = h(i, i).real();
  }
  return h;
}

HermitianEigenResult hermitian_eigen(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) {
    throw std::invalid_argument("hermitian_eigen: empty matrix");
  }
  ComplexMatrix a = hermitian_part_checked(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  // One sweep past the tolerance: convergence is quadratic, and small
  // eigenvalues of ill-conditioned input need the extra digits.
  int sweep = 0;
  bool polished = false;
  while (!polished) {
    polished = off_diagonal_norm(a) <= kJacobiTolerance * scale;
    if (++sweep > kJacobiMaxSweeps) {
      throw std::runtime_error("hermitian_eigen: Jacobi sweeps did not converge");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) {
          continue;
        }
        // Phase the (p,q) block real, then apply the real symmetric Schur
        // rotation. Column p of U is (c, -s e^{-i phi}), column q (s, c e^{-i phi}).
        const cplx phase = a(p, q) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        const cplx upp = c;
        const cplx upq = s;
        const cplx uqp = -s * std::conj(phase);
        const cplx uqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigenResult result;
  result.eigenvalues.reserve(n);
  result.eigenvectors.reserve(n);
  for (std::size_t k : order) {
    result.eigenvalues.push_back(a(k, k).real());
    std::vector<cplx> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = v(i, k);
    }
    result.eigenvectors.push_back(std::move(col));
  }
  return result;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  return hermitian_eigen(m).eigenvalues;
}

double trace_norm(const ComplexMatrix& m) {
  double sum = 0.0;
  for (double lambda : hermitian_eigenvalues(m)) {
    sum += std::abs(lambda);
  }
  return sum;
}

ComplexMatrix pd_sqrt(const ComplexMatrix& m) {
  return pd_spectral_function(m, [](double x) { return std::sqrt(x); });
}

ComplexMatrix pd_inverse_sqrt(const ComplexMatrix& m) {
  return pd_spectral_function(m, [](double x) { return 1.0 / std::sqrt(x); });
}

ComplexMatrix pd_inverse(const ComplexMatrix& m) {
  const double smallest = hermitian_eigenvalues(m).back();
  if (!(smallest > kPositiveDefiniteFloor)) {
    throw std::domain_error("matrix is not positive definite (smallest eigenvalue " +
                            std::to_string(smallest) + ")");
  }
  // Gauss-Jordan with partial pivoting in extended precision. The spectral
  // route loses about cond * eps through the eigenvectors.
  using lcplx = std::complex<long double>;
  const std::size_t n = m.dim();
  const std::size_t w = 2 * n;
  std::vector<lcplx> a(n * w);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * w + j] = lcplx(m(i, j));
    }
    a[i * w + n + i] = 1.0L;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * w + c]) > std::abs(a[pivot * w + c])) pivot = r;
    }
    for (std::size_t j = 0; j < w; ++j) std::swap(a[c * w + j], a[pivot * w + j]);
    const lcplx p = a[c * w + c];
    for (std::size_t j = 0; j < w; ++j) a[c * w + j] /= p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const lcplx f = a[r * w + c];
      for (std::size_t j = 0; j < w; ++j) a[r * w + j] -= f * a[c * w + j];
    }
  }
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const lcplx v = a[i * w + n + j];
      out(i, j) = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    }
  }
  return out;
}

} // namespace qsink
