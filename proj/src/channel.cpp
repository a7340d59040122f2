#include "qsink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsink {

namespace {

void require_dim(const ComplexMatrix& m, std::size_t dim, const char* what) {
  if (m.dim() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected a " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " operator, got dimension " +
                                std::to_string(m.dim()));
  }
}

const ComplexMatrix& two_qubit_pauli(std::size_t i, std::size_t j) {
  static const auto basis = [] {
    std::array<ComplexMatrix, 16> b;
    for (std::size_t p = 0; p < 4; ++p) {
      for (std::size_t q = 0; q < 4; ++q) {
        b[p * 4 + q] = kron(pauli::sigma(p), pauli::sigma(q));
      }
    }
    return b;
  }();
  return basis[i * 4 + j];
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t k = 0; k < a.dim(); ++k) {
      t += a(i, k) * b(k, i);
    }
  }
  return t;
}

double smallest_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m).back(); }

} // namespace

PauliTransferMatrix::PauliTransferMatrix() {
  for (std::size_t i = 0; i < 4; ++i) {
    m_[i * 4 + i] = 1.0;
  }
}

PauliTransferMatrix::PauliTransferMatrix(const std::array<double, 16>& row_major) : m_(row_major) {}

PauliTransferMatrix PauliTransferMatrix::diagonal(double m00, double m11, double m22, double m33) {
  PauliTransferMatrix p;
  p(0, 0) = m00;
  p(1, 1) = m11;
  p(2, 2) = m22;
  p(3, 3) = m33;
  return p;
}

PauliTransferMatrix PauliTransferMatrix::transpose() const {
  PauliTransferMatrix t;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      t(j, i) = (*this)(i, j);
    }
  }
  return t;
}

PauliTransferMatrix PauliTransferMatrix::scaled(double factor) const {
  PauliTransferMatrix s = *this;
  for (auto& x : s.m_) {
    x *= factor;
  }
  return s;
}

double max_abs_diff(const PauliTransferMatrix& a, const PauliTransferMatrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    d = std::max(d, std::abs(a.entries()[k] - b.entries()[k]));
  }
  return d;
}

std::array<cplx, 4> pauli_coefficients(const ComplexMatrix& x) {
  require_dim(x, 2, "pauli_coefficients");
  // tr[sigma_j X] written out for (I, X, Y, Z).
  return {x(0, 0) + x(1, 1), x(0, 1) + x(1, 0), cplx(0.0, 1.0) * (x(0, 1) - x(1, 0)),
          x(0, 0) - x(1, 1)};
}

ComplexMatrix from_pauli_coefficients(const std::array<cplx, 4>& r) {
  ComplexMatrix out(2);
  for (std::size_t k = 0; k < 4; ++k) {
    out += pauli::sigma(k) * (0.5 * r[k]);
  }
  return out;
}

ComplexMatrix apply(const PauliTransferMatrix& ptm, const ComplexMatrix& rho) {
  require_dim(rho, 2, "apply");
  const auto r = pauli_coefficients(rho);
  std::array<cplx, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      out[i] += ptm(i, j) * r[j];
    }
  }
  return from_pauli_coefficients(out);
}

ComplexMatrix apply_two_qubit(const PauliTransferMatrix& ptm1, const PauliTransferMatrix& ptm2,
                              const ComplexMatrix& rho12) {
  require_dim(rho12, 4, "apply_two_qubit");
  std::array<cplx, 16> coeff{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      coeff[i * 4 + j] = trace_of_product(two_qubit_pauli(i, j), rho12);
    }
  }
  // R' = M1 R M2^T
  std::array<cplx, 16> left{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t j = 0; j < 4; ++j) {
        left[i * 4 + j] += ptm1(i, k) * coeff[k * 4 + j];
      }
    }
  }
  ComplexMatrix out(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      cplx rij = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        rij += left[i * 4 + k] * ptm2(j, k);
      }
      if (rij != cplx{}) {
        out += two_qubit_pauli(i, j) * (0.25 * rij);
      }
    }
  }
  return out;
}

PauliTransferMatrix dual(const PauliTransferMatrix& ptm) { return ptm.transpose(); }

PauliTransferMatrix compose(const PauliTransferMatrix& outer, const PauliTransferMatrix& inner) {
  std::array<double, 16> m{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t j = 0; j < 4; ++j) {
        m[i * 4 + j] += outer(i, k) * inner(k, j);
      }
    }
  }
  return PauliTransferMatrix(m);
}

PauliTransferMatrix sandwich(const ComplexMatrix& x) {
  require_dim(x, 2, "sandwich");
  const ComplexMatrix xd = x.adjoint();
  std::array<double, 16> m{};
  for (std::size_t j = 0; j < 4; ++j) {
    const ComplexMatrix image = x * pauli::sigma(j) * xd;
    for (std::size_t i = 0; i < 4; ++i) {
      m[i * 4 + j] = 0.5 * trace_of_product(pauli::sigma(i), image).real();
    }
  }
  return PauliTransferMatrix(m);
}

ChoiMatrix choi(const PauliTransferMatrix& ptm) {
  ComplexMatrix c(4);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexMatrix unit(2);
      unit(i, j) = 1.0;
      const ComplexMatrix image = apply(ptm, unit);
      for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 2; ++l) {
          c(2 * i + k, 2 * j + l) = image(k, l);
        }
      }
    }
  }
  return {std::move(c)};
}

bool is_cp(const PauliTransferMatrix& ptm) {
  return smallest_eigenvalue(choi(ptm).c) >= -kPsdTolerance;
}

bool is_trace_nonincreasing(const PauliTransferMatrix& ptm) {
  const ComplexMatrix id = pauli::id();
  return smallest_eigenvalue(id - apply(dual(ptm), id)) >= -kPsdTolerance;
}

bool is_trace_preserving(const PauliTransferMatrix& ptm) {
  return std::abs(ptm(0, 0) - 1.0) <= kPsdTolerance && std::abs(ptm(0, 1)) <= kPsdTolerance &&
         std::abs(ptm(0, 2)) <= kPsdTolerance && std::abs(ptm(0, 3)) <= kPsdTolerance;
}

bool is_unital(const PauliTransferMatrix& ptm) {
  return std::abs(ptm(0, 0) - 1.0) <= kPsdTolerance && std::abs(ptm(1, 0)) <= kPsdTolerance &&
         std::abs(ptm(2, 0)) <= kPsdTolerance && std::abs(ptm(3, 0)) <= kPsdTolerance;
}

} // namespace qsink
