#pragma once

// Qubit linear maps in the Pauli transfer matrix representation
//   M_ij = 1/2 tr[sigma_i L(sigma_j)],  i, j in (0, x, y, z).
// A map acts on the Pauli coefficient vector r_j = tr[sigma_j X] as r -> M r,
// and on two-qubit operators as R -> M1 R M2^T with R_ij = tr[(sigma_i (x) sigma_j) X].

#include "qsink/linalg.hpp"

#include <array>
#include <cstddef>

namespace qsink {

class PauliTransferMatrix {
public:
  /// Identity map.
  PauliTransferMatrix();
  explicit PauliTransferMatrix(const std::array<double, 16>& row_major);

  static PauliTransferMatrix identity() { return {}; }
  static PauliTransferMatrix diagonal(double m00, double m11, double m22, double m33);

  double& operator()(std::size_t i, std::size_t j) { return m_[i * 4 + j]; }
  double operator()(std::size_t i, std::size_t j) const { return m_[i * 4 + j]; }
  const std::array<double, 16>& entries() const noexcept { return m_; }

  PauliTransferMatrix transpose() const;
  PauliTransferMatrix scaled(double factor) const;

  friend bool operator==(const PauliTransferMatrix&, const PauliTransferMatrix&) = default;

private:
  std::array<double, 16> m_{};
};

double max_abs_diff(const PauliTransferMatrix& a, const PauliTransferMatrix& b);

/// Choi matrix C = sum_ij |i><j| (x) L(|i><j|).
struct ChoiMatrix {
  ComplexMatrix c;
};

/// Pauli coefficients r_j = tr[sigma_j x] of a 2x2 operator.
std::array<cplx, 4> pauli_coefficients(const ComplexMatrix& x);
/// 1/2 sum_j r_j sigma_j.
ComplexMatrix from_pauli_coefficients(const std::array<cplx, 4>& r);

/// Applies the map to any 2x2 operator (linear extension, so non-Hermitian
/// inputs such as matrix units are fine).
ComplexMatrix apply(const PauliTransferMatrix& ptm, const ComplexMatrix& rho);

/// (L1 (x) L2)[rho12] through the coefficient sandwich M1 R M2^T.
ComplexMatrix apply_two_qubit(const PauliTransferMatrix& ptm1, const PauliTransferMatrix& ptm2,
                              const ComplexMatrix& rho12);

/// Map adjoint w.r.t. the Hilbert-Schmidt inner product.
PauliTransferMatrix dual(const PauliTransferMatrix& ptm);

/// outer o inner.
PauliTransferMatrix compose(const PauliTransferMatrix& outer, const PauliTransferMatrix& inner);

/// PTM of rho -> X rho X^dag.
PauliTransferMatrix sandwich(const ComplexMatrix& x);

ChoiMatrix choi(const PauliTransferMatrix& ptm);

/// Smallest-eigenvalue tolerance shared by the positivity predicates.
inline constexpr double kPsdTolerance = 1e-9;

bool is_cp(const PauliTransferMatrix& ptm);
bool is_trace_nonincreasing(const PauliTransferMatrix& ptm);
bool is_trace_preserving(const PauliTransferMatrix& ptm);
bool is_unital(const PauliTransferMatrix& ptm);

} // namespace qsink
