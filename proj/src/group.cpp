#include "ucd/group.hpp"

#include <algorithm>
#include <cmath>

namespace ucd {

Matrix form_matrix(const Signature& sig) {
  if (sig.c < 1 || sig.d < 1) {
    throw std::invalid_argument("form_matrix: signature counts must be >= 1");
  }
  Matrix g = Matrix::Identity(sig.size(), sig.size());
  g.bottomRightCorner(sig.d, sig.d) *= -1.0;
  return g;
}

double membership_defect(const Matrix& t, const Signature& sig) {
  if (t.rows() != sig.size() || t.cols() != sig.size()) {
    throw std::invalid_argument("membership_defect: size mismatch");
  }
  const Matrix g = form_matrix(sig);
  return (t.adjoint() * g * t - g).norm();
}

PseudoUnitary::PseudoUnitary(Matrix t, Signature sig)
    : mat_(std::move(t)), sig_(sig) {
  defect_ = membership_defect(mat_, sig_);
  if (defect_ > cert_threshold(mat_)) {
    throw NumericalError("PseudoUnitary: membership defect " +
                         std::to_string(defect_) +
                         " exceeds certification threshold");
  }
}

PseudoUnitary u_theta(const Signature& sig, double theta) {
  return PseudoUnitary(
      b_z(sig, std::polar(1.0, 2.0 * M_PI * theta)), sig);
}

Matrix b_z(const Signature& sig, Complex z) {
  Matrix b = Matrix::Identity(sig.size(), sig.size());
  b.topLeftCorner(sig.c, sig.c) *= z;
  return b;
}

double n_r(const Matrix& t, int r) {
  if (r < 1 || r > std::min(t.rows(), t.cols())) {
    throw std::invalid_argument("n_r: r out of range");
  }
  const SvdResult dec = svd(t);
  const double smin = dec.sigma(dec.sigma.size() - 1);
  if (smin <= 1e-300 * (1.0 + dec.sigma(0))) {
    throw NumericalError("n_r: singular input");
  }
  double acc = 0.0;
  for (int i = 0; i < r; ++i) {
    const double s = dec.sigma(i);
    acc += std::log(0.5 * (s + 1.0 / s));
  }
  return acc;
}

Matrix hyperbolic_middle(const Eigen::VectorXd& gamma, const Signature& sig) {
  const int m = std::min(sig.c, sig.d);
  if (gamma.size() != m) {
    throw std::invalid_argument("hyperbolic_middle: gamma length mismatch");
  }
  Matrix k = Matrix::Identity(sig.size(), sig.size());
  for (int i = 0; i < m; ++i) {
    const double ch = std::cosh(gamma(i));
    const double sh = std::sinh(gamma(i));
    k(i, i) = ch;
    k(sig.c + i, sig.c + i) = ch;
    k(i, sig.c + i) = sh;
    k(sig.c + i, i) = sh;
  }
  return k;
}

Matrix assemble(const HyperbolicDecomposition& dec, const Signature& sig) {
  Matrix left = Matrix::Zero(sig.size(), sig.size());
  left.topLeftCorner(sig.c, sig.c) = dec.u1;
  left.bottomRightCorner(sig.d, sig.d) = dec.u2;
  Matrix right = Matrix::Zero(sig.size(), sig.size());
  right.topLeftCorner(sig.c, sig.c) = dec.v1;
  right.bottomRightCorner(sig.d, sig.d) = dec.v2;
  return left * hyperbolic_middle(dec.gamma, sig) * right;
}

namespace {

// Exchange of the first c and last d coordinates; conjugation by it maps
// U(c,d) onto U(d,c), reducing the c < d case to c >= d.
Matrix swap_permutation(const Signature& sig) {
  Matrix p = Matrix::Zero(sig.size(), sig.size());
  p.topRightCorner(sig.d, sig.d) = Matrix::Identity(sig.d, sig.d);
  p.bottomLeftCorner(sig.c, sig.c) = Matrix::Identity(sig.c, sig.c);
  return p;
}

HyperbolicDecomposition decompose_wide(const Matrix& t, const Signature& sig) {
  // c >= d here. Follows the constructive proof: SVD of the B block
  // fixes U1, V2 and Gamma, then D and A determine U2 and V1.
  const int c = sig.c, d = sig.d;
  const Matrix b = t.topRightCorner(c, d);
  const Matrix dblk = t.bottomRightCorner(d, d);
  const Matrix a = t.topLeftCorner(c, c);

  const SvdResult bsvd = svd(b, /*full_u=*/true);

  HyperbolicDecomposition out;
  out.gamma.resize(d);
  for (int i = 0; i < d; ++i) {
    out.gamma(i) = std::asinh(bsvd.sigma(i));
  }
  out.u1 = bsvd.u;
  out.v2 = bsvd.v.adjoint();

  Eigen::VectorXd inv_cosh(d);
  for (int i = 0; i < d; ++i) inv_cosh(i) = 1.0 / std::cosh(out.gamma(i));
  out.u2 = dblk * out.v2.adjoint() * inv_cosh.asDiagonal();

  Eigen::VectorXd inv_pad = Eigen::VectorXd::Ones(c);
  inv_pad.head(d) = inv_cosh;
  out.v1 = inv_pad.asDiagonal() * (out.u1.adjoint() * a);
  return out;
}

}  // namespace

HyperbolicDecomposition hyperbolic_decompose(const PseudoUnitary& t) {
  const Signature sig = t.sig();
  if (sig.c >= sig.d) {
    return decompose_wide(t.mat(), sig);
  }
  // Swap coordinates, decompose in U(d,c), and swap the factors back.
  const Matrix p = swap_permutation(sig);
  const Signature swapped{sig.d, sig.c};
  HyperbolicDecomposition inner =
      decompose_wide(p * t.mat() * p.adjoint(), swapped);
  HyperbolicDecomposition out;
  out.u1 = std::move(inner.u2);
  out.u2 = std::move(inner.u1);
  out.v1 = std::move(inner.v2);
  out.v2 = std::move(inner.v1);
  out.gamma = std::move(inner.gamma);
  return out;
}

Matrix d_block(const PseudoUnitary& t) {
  return t.mat().bottomRightCorner(t.sig().d, t.sig().d);
}

Matrix haar_unitary(int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("haar_unitary: n must be >= 1");
  Matrix g(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = Complex(rng.gaussian() * s, rng.gaussian() * s);
    }
  }
  return qr_positive(g).q;
}

PseudoUnitary sample_pseudo_unitary(const Signature& sig, double gamma_max,
                                    RngStream& rng) {
  if (gamma_max < 0.0) {
    throw std::invalid_argument("sample_pseudo_unitary: gamma_max < 0");
  }
  HyperbolicDecomposition dec;
  dec.u1 = haar_unitary(sig.c, rng);
  dec.u2 = haar_unitary(sig.d, rng);
  dec.v1 = haar_unitary(sig.c, rng);
  dec.v2 = haar_unitary(sig.d, rng);
  const int m = std::min(sig.c, sig.d);
  std::vector<double> gs(static_cast<size_t>(m));
  for (double& g : gs) g = rng.uniform(0.0, gamma_max);
  std::sort(gs.begin(), gs.end(), std::greater<double>());
  dec.gamma = Eigen::Map<Eigen::VectorXd>(gs.data(), m);
  return PseudoUnitary(assemble(dec, sig), sig);
}

HermitianFormSpec conjugator_from_form(const Matrix& g) {
  const HermitianEigResult eig = hermitian_eig(g);
  const double scale = g.norm();
  int c = 0, d = 0;
  for (Eigen::Index i = 0; i < eig.lambda.size(); ++i) {
    if (std::abs(eig.lambda(i)) <= 1e-10 * scale) {
      throw NumericalError("conjugator_from_form: form is near-singular");
    }
    (eig.lambda(i) > 0.0 ? c : d) += 1;
  }
  if (c < 1 || d < 1) {
    throw std::invalid_argument(
        "conjugator_from_form: form must be indefinite (c,d >= 1)");
  }
  // Eigenvalues are descending, so positives already come first and the
  // sorting permutation is the identity.
  Eigen::VectorXd root = eig.lambda.cwiseAbs().cwiseSqrt();
  HermitianFormSpec spec;
  spec.g = g;
  spec.sig = Signature{c, d};
  spec.conjugator_b = root.asDiagonal() * eig.q.adjoint();
  return spec;
}

Matrix symplectic_form(int d) {
  Matrix j = Matrix::Zero(2 * d, 2 * d);
  j.topRightCorner(d, d) = Matrix::Identity(d, d);
  j.bottomLeftCorner(d, d) = -Matrix::Identity(d, d);
  return j;
}

double hsp_defect(const Matrix& t, int d) {
  if (t.rows() != 2 * d || t.cols() != 2 * d) {
    throw std::invalid_argument("hsp_defect: size mismatch");
  }
  const Matrix j = symplectic_form(d);
  return (t.adjoint() * j * t - j).norm();
}

Matrix cayley(int d) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix c = Matrix::Zero(2 * d, 2 * d);
  c.topLeftCorner(d, d) = s * Matrix::Identity(d, d);
  c.topRightCorner(d, d) = Complex(0.0, s) * Matrix::Identity(d, d);
  c.bottomLeftCorner(d, d) = s * Matrix::Identity(d, d);
  c.bottomRightCorner(d, d) = Complex(0.0, -s) * Matrix::Identity(d, d);
  return c;
}

Matrix r_theta(int d, double theta) {
  const double co = std::cos(M_PI * theta);
  const double si = std::sin(M_PI * theta);
  Matrix r = Matrix::Zero(2 * d, 2 * d);
  r.topLeftCorner(d, d) = co * Matrix::Identity(d, d);
  r.topRightCorner(d, d) = -si * Matrix::Identity(d, d);
  r.bottomLeftCorner(d, d) = si * Matrix::Identity(d, d);
  r.bottomRightCorner(d, d) = co * Matrix::Identity(d, d);
  return r;
}

Matrix embed_sl2(const Eigen::Matrix2d& a) {
  if (std::abs(a.determinant() - 1.0) > 1e-10) {
    throw std::invalid_argument("embed_sl2: determinant must be 1");
  }
  return a.cast<Complex>();
}

Matrix schrodinger_transfer(const Matrix& t_hop, const Matrix& v, double e) {
  const Eigen::Index d = t_hop.rows();
  if (t_hop.cols() != d || v.rows() != d || v.cols() != d) {
    throw std::invalid_argument("schrodinger_transfer: size mismatch");
  }
  if ((v - v.adjoint()).norm() > 1e-8 * (1.0 + v.norm())) {
    throw std::invalid_argument("schrodinger_transfer: V not hermitian");
  }
  const SvdResult tsvd = svd(t_hop);
  const double smin = tsvd.sigma(tsvd.sigma.size() - 1);
  if (smin <= 0.0 || tsvd.sigma(0) / smin > 1e8) {
    throw NumericalError("schrodinger_transfer: hopping matrix ill-conditioned");
  }
  const Matrix t_inv = inverse(t_hop);
  Matrix out = Matrix::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d) =
      (e * Matrix::Identity(d, d) - v) * t_inv;
  out.topRightCorner(d, d) = -t_hop.adjoint();
  out.bottomLeftCorner(d, d) = t_inv;
  return out;
}

}  // namespace ucd
