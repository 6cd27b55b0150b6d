#include "ucd/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ucd {

SvdResult svd(const Matrix& m, bool full_u) {
  unsigned options = full_u ? (Eigen::ComputeFullU | Eigen::ComputeThinV)
                            : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::JacobiSVD<Matrix> solver(m, options);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("svd: iteration did not converge");
  }
  SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  if (!out.sigma.allFinite()) {
    throw NumericalError("svd: non-finite singular values");
  }
  double residual =
      (m - out.u.leftCols(out.sigma.size()) * out.sigma.asDiagonal() *
               out.v.adjoint())
          .norm();
  if (residual > 1e-12 * (1.0 + m.norm()) * 100.0) {
    throw NumericalError("svd: backward error out of contract");
  }
  return out;
}

ComplexVector eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigenvalues: matrix must be square");
  }
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: QR iteration did not converge");
  }
  return solver.eigenvalues();
}

QrResult qr_positive(const Matrix& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (rows < cols) {
    throw std::invalid_argument("qr_positive: requires rows >= cols");
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  Matrix r = qr.matrixQR()
                 .topRows(cols)
                 .template triangularView<Eigen::Upper>();
  const double scale = 1.0 + m.norm();
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double a = std::abs(r(i, i));
    if (a <= 1e-13 * scale) {
      throw NumericalError("qr_positive: rank-deficient input");
    }
    const Complex phase = r(i, i) / a;
    q.col(i) *= phase;
    r.row(i) *= std::conj(phase);
    r(i, i) = a;  // kill imaginary roundoff dust on the diagonal
  }
  return {std::move(q), std::move(r)};
}

HermitianEigResult hermitian_eig(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitian_eig: matrix must be square");
  }
  if ((m - m.adjoint()).norm() > tol * (1.0 + m.norm())) {
    throw std::invalid_argument("hermitian_eig: input not hermitian");
  }
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: did not converge");
  }
  // Eigen returns ascending order; the contract is descending.
  const Eigen::Index n = h.rows();
  HermitianEigResult out;
  out.q.resize(n, n);
  out.lambda.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.lambda(i) = solver.eigenvalues()(n - 1 - i);
    out.q.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

Complex det(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("det: matrix must be square");
  }
  return m.determinant();
}

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("inverse: matrix must be square");
  }
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) {
    throw NumericalError("inverse: matrix is numerically singular");
  }
  return lu.inverse();
}

}  // namespace ucd
