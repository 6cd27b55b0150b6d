#pragma once

// Dense complex-matrix primitives. Thin wrappers around Eigen's dense
// solvers with explicit accuracy checks, so the rest of the library can
// rely on a fixed contract (backward error, ordering, normalization)
// rather than on solver internals.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ucd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Thrown when an iterative kernel fails to converge or an input violates
// a numerical precondition (rank deficiency, singularity, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Default absolute tolerance; operation-specific thresholds are stated at
// the call sites. Tolerances are relative to (1 + ||.||_F).
inline constexpr double kDefaultTol = 1e-10;

struct SvdResult {
  Matrix u;          // orthonormal columns
  RealVector sigma;  // descending, >= 0
  Matrix v;          // orthonormal columns; m = u * sigma.asDiagonal() * v^*
};

// Singular value decomposition. With full_u the left factor is square
// (needed for the hyperbolic decomposition of rectangular blocks).
SvdResult svd(const Matrix& m, bool full_u = false);

// Eigenvalue multiset (algebraic multiplicity, unspecified order).
ComplexVector eigenvalues(const Matrix& m);

struct QrResult {
  Matrix q;  // orthonormal columns
  Matrix r;  // upper triangular, strictly positive real diagonal
};

// QR with the positive-diagonal normalization, which makes the
// factorization unique and log|R_ii| phase-unambiguous. Requires
// rows >= cols and full column rank.
QrResult qr_positive(const Matrix& m);

struct HermitianEigResult {
  Matrix q;           // unitary
  RealVector lambda;  // real, descending
};

// Eigendecomposition of a hermitian matrix; the input is symmetrized
// internally but must be hermitian within tol*(1+||m||_F).
HermitianEigResult hermitian_eig(const Matrix& m, double tol = 1e-8);

Complex det(const Matrix& m);
Matrix inverse(const Matrix& m);

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

}  // namespace ucd
