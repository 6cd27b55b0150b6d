#include "ucd/moebius.hpp"

#include <algorithm>
#include <cmath>

#include "ucd/parallel.hpp"

namespace ucd {

DomainPoint make_domain_point(Matrix m) {
  const SvdResult dec = svd(m);
  const double top = dec.sigma.size() > 0 ? dec.sigma(0) : 0.0;
  const double slack = 1.0 - top * top;
  if (slack <= 0.0) {
    throw std::invalid_argument(
        "make_domain_point: point is not strictly inside R_I");
  }
  return DomainPoint{std::move(m), slack};
}

const Signature& ProductFamily::sig() const {
  if (factors.empty()) {
    throw std::invalid_argument("ProductFamily: needs at least one factor");
  }
  const Signature& s = factors.front().sig();
  for (const auto& f : factors) {
    if (!(f.sig() == s)) {
      throw std::invalid_argument("ProductFamily: mixed signatures");
    }
  }
  return factors.front().sig();
}

DomainPoint moebius_apply(const Matrix& t, const Signature& sig,
                          const DomainPoint& m) {
  const int c = sig.c, d = sig.d;
  if (t.rows() != sig.size() || m.m.rows() != c || m.m.cols() != d) {
    throw std::invalid_argument("moebius_apply: size mismatch");
  }
  const Matrix num =
      t.topLeftCorner(c, c) * m.m + t.topRightCorner(c, d);
  const Matrix den =
      t.bottomLeftCorner(d, c) * m.m + t.bottomRightCorner(d, d);
  Eigen::FullPivLU<Matrix> lu(den);
  if (!lu.isInvertible()) {
    // Cannot occur for certified group elements and interior points;
    // reaching this signals a certification breach upstream.
    throw NumericalError("moebius_apply: CM + D numerically singular");
  }
  return make_domain_point(num * lu.inverse());
}

DomainPoint moebius_apply(const PseudoUnitary& t, const DomainPoint& m) {
  return moebius_apply(t.mat(), t.sig(), m);
}

Matrix product_eval(const ProductFamily& fam, Complex z) {
  const Signature sig = fam.sig();
  const Matrix b = b_z(sig, z);
  Matrix acc = b * fam.factors.front().mat();
  for (size_t j = 1; j < fam.factors.size(); ++j) {
    acc = acc * b * fam.factors[j].mat();
  }
  return acc;
}

FixedPointResult fixed_point(const ProductFamily& fam, Complex z, double tol,
                             int max_iter) {
  if (std::abs(z) >= 1.0) {
    throw std::invalid_argument("fixed_point: requires |z| < 1 strictly");
  }
  if (tol <= 0.0) {
    throw std::invalid_argument("fixed_point: tol must be positive");
  }
  const Signature sig = fam.sig();
  const Matrix dz = product_eval(fam, z);

  // Start at the center of the domain, the canonical interior point.
  DomainPoint m = make_domain_point(Matrix::Zero(sig.c, sig.d));
  int iter = 0;
  double change = 0.0;
  for (;;) {
    DomainPoint next = moebius_apply(dz, sig, m);
    change = (next.m - m.m).norm();
    m = std::move(next);
    ++iter;
    if (change <= tol * (1.0 + m.m.norm())) break;
    if (iter >= max_iter) {
      throw NumericalError(
          "fixed_point: max_iter exceeded (contraction too slow)");
    }
  }

  FixedPointResult out;
  out.residual = (moebius_apply(dz, sig, m).m - m.m).norm();
  out.m_star = std::move(m);
  out.iterations = iter;
  // D(z)(M;1) = (M;1)(CM+D) at the fixed point, so CM+D is exactly the
  // restriction matrix in this basis.
  out.d_w = dz.bottomLeftCorner(sig.d, sig.c) * out.m_star.m +
            dz.bottomRightCorner(sig.d, sig.d);
  const Complex dw_det = out.d_w.determinant();
  out.log_abs_det = std::log(std::abs(dw_det));
  if (!std::isfinite(out.log_abs_det)) {
    throw NumericalError("fixed_point: ln|det D_W| not finite");
  }
  return out;
}

double spectral_radius_wedge(const Matrix& t, int d) {
  if (d < 1 || d > t.rows()) {
    throw std::invalid_argument("spectral_radius_wedge: d out of range");
  }
  const ComplexVector eig = eigenvalues(t);
  std::vector<double> mags(static_cast<size_t>(eig.size()));
  for (Eigen::Index i = 0; i < eig.size(); ++i) mags[i] = std::abs(eig(i));
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double prod = 1.0;
  for (int i = 0; i < d; ++i) prod *= mags[static_cast<size_t>(i)];
  return prod;
}

double wedge_log_norm(const Matrix& t, int k) {
  if (k < 1 || k > std::min(t.rows(), t.cols())) {
    throw std::invalid_argument("wedge_log_norm: k out of range");
  }
  const SvdResult dec = svd(t);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::log(dec.sigma(i));
  return acc;
}

MeanValueReport mean_value_check(const ProductFamily& fam, double radius,
                                 int n_points, int threads) {
  if (radius <= 0.0 || radius >= 1.0) {
    throw std::invalid_argument("mean_value_check: radius must be in (0,1)");
  }
  if (n_points < 8 || (n_points & (n_points - 1)) != 0) {
    throw std::invalid_argument(
        "mean_value_check: n_points must be a power of two >= 8");
  }
  const int d = fam.sig().d;
  std::vector<double> node(static_cast<size_t>(n_points));
  parallel_index(n_points, threads, [&](int k) {
    const Complex z =
        std::polar(radius, 2.0 * M_PI * static_cast<double>(k) / n_points);
    node[static_cast<size_t>(k)] =
        std::log(spectral_radius_wedge(product_eval(fam, z), d));
  });
  double sum = 0.0;
  for (double v : node) sum += v;

  MeanValueReport rep;
  rep.circle_mean = sum / n_points;
  rep.center_value = 0.0;
  for (const auto& f : fam.factors) rep.center_value += n_r(f.mat(), d);
  rep.gap = std::abs(rep.circle_mean - rep.center_value);
  return rep;
}

}  // namespace ucd
