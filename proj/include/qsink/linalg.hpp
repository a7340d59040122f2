#pragma once

// Dense complex linear algebra for the small Hermitian problems that show up
// in qubit and two-qubit state manipulation. Matrices are square, row-major
// and value-semantic; the spectral routines use cyclic complex Jacobi
// rotations, which is plenty for dimensions 2 and 4.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qsink {

using cplx = std::complex<double>;

class ComplexMatrix {
public:
  ComplexMatrix() = default;

  /// Zero matrix of the given dimension.
  explicit ComplexMatrix(std::size_t dim);

  /// Row-major entries; `entries.size()` must be a perfect square.
  ComplexMatrix(std::size_t dim, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> diag);
  static ComplexMatrix diagonal(std::initializer_list<double> diag);
  /// |v><v| for a column vector v.
  static ComplexMatrix outer(std::span<const cplx> v);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const cplx> entries() const noexcept { return data_; }

  cplx& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const;
  /// Largest absolute entry.
  double max_abs() const;
  double frobenius_norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cplx scalar);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(ComplexMatrix m, cplx scalar) { return m *= scalar; }
  friend ComplexMatrix operator*(cplx scalar, ComplexMatrix m) { return m *= scalar; }
  friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  /// Matrix-vector product.
  std::vector<cplx> apply(std::span<const cplx> v) const;

private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

/// max_ij |a_ij - b_ij|; dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Standard qubit operators, basis order (|0>, |1>).
namespace pauli {
ComplexMatrix id();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// sigma_0..sigma_3 = (I, X, Y, Z).
const ComplexMatrix& sigma(std::size_t k);
} // namespace pauli

struct HermitianEigenResult {
  std::vector<double> eigenvalues; // descending
  std::vector<std::vector<cplx>> eigenvectors;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// (Id (x) T)[rho] on a 4x4 two-qubit operator: each 2x2 block is transposed.
ComplexMatrix partial_transpose_second(const ComplexMatrix& rho);

/// Hermiticity tolerance used by every spectral routine.
inline constexpr double kHermitianTolerance = 1e-10;

/// Throws std::invalid_argument when ||m - m^dag||_max exceeds the tolerance;
/// otherwise returns (m + m^dag)/2.
ComplexMatrix hermitian_part_checked(const ComplexMatrix& m);

HermitianEigenResult hermitian_eigen(const ComplexMatrix& m);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Sum of |lambda_k| for a Hermitian argument.
double trace_norm(const ComplexMatrix& m);

// Functions of a Hermitian positive definite matrix. The smallest
// eigenvalue must exceed 1e-12; anything else throws std::domain_error.
ComplexMatrix pd_sqrt(const ComplexMatrix& m);
ComplexMatrix pd_inverse_sqrt(const ComplexMatrix& m);
ComplexMatrix pd_inverse(const ComplexMatrix& m);

} // namespace qsink
