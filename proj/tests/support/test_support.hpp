#pragma once

// Shared fixtures for the test binaries: seeded random generators for states
// and maps, and a superoperator-based reference for product channels that
// never touches the Pauli-coefficient code path.

#include "qsink/channel.hpp"
#include "qsink/entanglement.hpp"
#include "qsink/linalg.hpp"
#include "qsink/pdl.hpp"

#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace qsink::testing {

class Rng {
public:
  explicit Rng(std::uint64_t seed = 20240611) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  cplx complex_normal() { return {normal(), normal()}; }

private:
  std::mt19937_64 engine_;
};

inline ComplexMatrix random_matrix(Rng& rng, std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = rng.complex_normal();
    }
  }
  return m;
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  const ComplexMatrix g = random_matrix(rng, n);
  return (g + g.adjoint()) * cplx(0.5);
}

inline std::vector<cplx> haar_vector(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  double norm2 = 0.0;
  for (auto& z : v) {
    z = rng.complex_normal();
    norm2 += std::norm(z);
  }
  for (auto& z : v) {
    z /= std::sqrt(norm2);
  }
  return v;
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
inline ComplexMatrix haar_unitary(Rng& rng, std::size_t n) {
  std::vector<std::vector<cplx>> cols;
  while (cols.size() < n) {
    std::vector<cplx> v = haar_vector(rng, n);
    for (const auto& c : cols) {
      cplx overlap = 0.0;
      for (std::size_t i = 0; i < n; ++i) overlap += std::conj(c[i]) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= overlap * c[i];
    }
    double norm2 = 0.0;
    for (const auto& z : v) norm2 += std::norm(z);
    for (auto& z : v) z /= std::sqrt(norm2);
    cols.push_back(std::move(v));
  }
  ComplexMatrix u(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) u(i, j) = cols[j][i];
  }
  return u;
}

/// Hermitian positive definite with eigenvalues log-uniform in [1, condition].
inline ComplexMatrix random_pd(Rng& rng, std::size_t n, double condition) {
  std::vector<double> spectrum(n);
  for (auto& x : spectrum) {
    x = std::exp(rng.uniform(0.0, std::log(condition)));
  }
  spectrum.front() = 1.0;
  spectrum.back() = condition;
  const ComplexMatrix u = haar_unitary(rng, n);
  return u * ComplexMatrix::diagonal(spectrum) * u.adjoint();
}

/// Mixed state from the Ginibre ensemble, G G^dag / tr.
inline ComplexMatrix random_density(Rng& rng, std::size_t n) {
  const ComplexMatrix g = random_matrix(rng, n);
  ComplexMatrix rho = g * g.adjoint();
  return rho * cplx(1.0 / rho.trace().real());
}

inline ComplexMatrix haar_pure_density(Rng& rng, std::size_t n) {
  return ComplexMatrix::outer(haar_vector(rng, n));
}

/// Random convex mixture of product states.
inline ComplexMatrix random_separable(Rng& rng, int terms) {
  ComplexMatrix rho(4);
  std::vector<double> weights(static_cast<std::size_t>(terms));
  double total = 0.0;
  for (auto& w : weights) {
    w = rng.uniform();
    total += w;
  }
  for (const double w : weights) {
    const bool pure = rng.uniform() < 0.5;
    const ComplexMatrix a = pure ? haar_pure_density(rng, 2) : random_density(rng, 2);
    const ComplexMatrix b = pure ? haar_pure_density(rng, 2) : random_density(rng, 2);
    rho += kron(a, b) * cplx(w / total);
  }
  return rho;
}

inline PauliTransferMatrix random_ptm(Rng& rng) {
  std::array<double, 16> m{};
  for (auto& x : m) x = rng.uniform(-1.0, 1.0);
  return PauliTransferMatrix(m);
}

inline ChannelParams random_params(Rng& rng, double max_rate = 5.0) {
  return {rng.uniform(0.0, max_rate), rng.uniform(0.0, max_rate), rng.uniform(0.0, max_rate)};
}

inline ComplexMatrix werner(double p) {
  const auto psi = psi_plus();
  return ComplexMatrix::outer(psi) * cplx(p) + ComplexMatrix::identity(4) * cplx((1.0 - p) / 4.0);
}

// Superoperator reference. For a qubit map with PTM M,
//   L[X] = 1/2 sum_kl M_kl sigma_k tr[sigma_l X],
// so on row-major vec(X): S = 1/2 sum_kl M_kl vec(sigma_k) vec(sigma_l^T)^T.
inline ComplexMatrix superoperator(const PauliTransferMatrix& m) {
  ComplexMatrix s(4);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t l = 0; l < 4; ++l) {
      const ComplexMatrix& sk = pauli::sigma(k);
      const ComplexMatrix slt = pauli::sigma(l).transpose();
      for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
          s(r, c) += 0.5 * m(k, l) * sk(r / 2, r % 2) * slt(c / 2, c % 2);
        }
      }
    }
  }
  return s;
}

/// 16x16 superoperator of L1 (x) L2 on row-major vec of a 4x4 operator.
inline ComplexMatrix product_superoperator(const PauliTransferMatrix& m1,
                                           const PauliTransferMatrix& m2) {
  const ComplexMatrix s1 = superoperator(m1);
  const ComplexMatrix s2 = superoperator(m2);
  ComplexMatrix s(16);
  // Output entry (k1 k2, l1 l2) from input entry (a1 a2, b1 b2).
  for (std::size_t k1 = 0; k1 < 2; ++k1)
    for (std::size_t k2 = 0; k2 < 2; ++k2)
      for (std::size_t l1 = 0; l1 < 2; ++l1)
        for (std::size_t l2 = 0; l2 < 2; ++l2)
          for (std::size_t a1 = 0; a1 < 2; ++a1)
            for (std::size_t a2 = 0; a2 < 2; ++a2)
              for (std::size_t b1 = 0; b1 < 2; ++b1)
                for (std::size_t b2 = 0; b2 < 2; ++b2) {
                  const std::size_t row = (2 * k1 + k2) * 4 + (2 * l1 + l2);
                  const std::size_t col = (2 * a1 + a2) * 4 + (2 * b1 + b2);
                  s(row, col) = s1(2 * k1 + l1, 2 * a1 + b1) * s2(2 * k2 + l2, 2 * a2 + b2);
                }
  return s;
}

inline ComplexMatrix apply_product_reference(const PauliTransferMatrix& m1,
                                             const PauliTransferMatrix& m2,
                                             const ComplexMatrix& rho) {
  const auto out = product_superoperator(m1, m2).apply(rho.entries());
  return ComplexMatrix(4, std::vector<cplx>(out.begin(), out.end()));
}

/// Smallest eigenvalue of the partial transpose of the normalized operator.
inline double min_pt_eigenvalue(const ComplexMatrix& rho) {
  const ComplexMatrix unit = rho * cplx(1.0 / rho.trace().real());
  return hermitian_eigenvalues(partial_transpose_second(unit)).back();
}

} // namespace qsink::testing
