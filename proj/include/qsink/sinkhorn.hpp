#pragma once

// Quantum Sinkhorn normal form of a qubit map L: positive definite A, B with
//
//   Y = Phi_A o L o Phi_B,   Phi_X[rho] = X rho X^dag,
//
// trace preserving and unital. A = sqrt(S) and B = (L^dag[S])^{-1/2}, where S
// is a fixed point of F[S] = (L[(L^dag[S])^{-1}])^{-1}. For the loss +
// depolarization family S = I + s sigma_z is available in closed form; the
// fixed-point iteration handles general strictly positive maps.

#include "qsink/channel.hpp"
#include "qsink/pdl.hpp"

#include <stdexcept>

namespace qsink {

/// The map does not send every nonzero PSD operator to a positive definite one.
class NotStrictlyPositiveError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Pauli-diagonal parameters of a unital trace-preserving qubit map.
struct UnitalParameters {
  double lambda_x = 1.0;
  double lambda_y = 1.0;
  double lambda_z = 1.0;
};

struct SinkhornDecomposition {
  double s = 0.0;
  ComplexMatrix a_op = ComplexMatrix::identity(2);
  ComplexMatrix b_op = ComplexMatrix::identity(2);
  double lambda_x = 1.0;
  double lambda_y = 1.0;
  double lambda_z = 1.0;
  PauliTransferMatrix upsilon;

  UnitalParameters lambdas() const { return {lambda_x, lambda_y, lambda_z}; }
};

/// Fixed-point iteration on F starting from S = I, with tr[S] = 2 restored
/// after every step. Returns S once ||F[S] - S||_max <= tol.
///
/// Throws NotStrictlyPositiveError when the probe states (six Pauli
/// eigenstates and I/2) do not all map to positive definite operators and
/// the starting point is not already a fixed point; ConvergenceError when
/// max_iter is exhausted.
ComplexMatrix fixed_point_iterate(const PauliTransferMatrix& ptm, double tol = 1e-12,
                                  int max_iter = 10000);

/// F[S] for a qubit map.
ComplexMatrix sinkhorn_fixed_point_map(const PauliTransferMatrix& ptm, const ComplexMatrix& s);

/// s of the ansatz S = I + s sigma_z. Evaluated as -2b / (a + d + radical),
/// the rationalized form of -(a + d - radical) / (2b).
double closed_form_s(const AbcdCoefficients& coeffs);

/// Diagonal of B = (L^dag[S])^{-1/2}: (1/sqrt(a+b+s(b+d)), 1/sqrt(a-b+s(b-d))).
/// Throws std::domain_error when either radicand is not positive.
std::array<double, 2> b_diagonal(const AbcdCoefficients& coeffs, double s);

/// lambda_x = lambda_y = 2c / (a - d + radical), lambda_z = 4 det / (a - d + radical)^2.
UnitalParameters unital_parameters(const AbcdCoefficients& coeffs);

/// Same quantities expressed through the rates alone. With
/// u = gamma sinh(Gamma t/2)/Gamma and w = u + sqrt(1 + u^2):
/// lambda_x = lambda_y = exp(-gamma t/2)/w, lambda_z = 1/w^2. Free of the
/// overall attenuation, so it stays finite for arbitrarily long times.
UnitalParameters unital_parameters(const ChannelParams& params, double t);

/// Full closed-form decomposition. At t = 0 returns the trivial one.
/// Verifies that Y built by composition equals diag(1, lx, ly, lz) to 1e-9
/// and throws std::logic_error otherwise.
SinkhornDecomposition decompose(const ChannelParams& params, double t);

/// Phi_{A^-1} o Y o Phi_{B^-1}.
PauliTransferMatrix reconstruct(const SinkhornDecomposition& decomposition);

} // namespace qsink
