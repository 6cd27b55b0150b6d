#pragma once

// The classical domain R_I(c,d) = {M : M^*M < 1}, the Moebius action of
// U(c,d) on it, fixed points of the disk-contracted products D(z), and
// the mean-value (harmonicity) machinery on interior circles.

#include <vector>

#include "ucd/group.hpp"
#include "ucd/numkernel.hpp"

namespace ucd {

// A strict interior point of R_I(c,d). slack = 1 - sigma_max(m)^2 > 0.
struct DomainPoint {
  Matrix m;
  double slack;
};

// Validates the strict contraction M^*M < 1.
DomainPoint make_domain_point(Matrix m);

// An ordered tuple T_1, ..., T_n sharing one signature; the building
// block of the finite products D(z) = B(z)T_1 B(z)T_2 ... B(z)T_n.
struct ProductFamily {
  std::vector<PseudoUnitary> factors;

  const Signature& sig() const;
};

// Moebius action t . m = (A m + B)(C m + D)^{-1} on R_I(c,d), with the
// block sizes read off from sig. The raw-matrix overload is used for the
// non-group elements D(z), |z| < 1, which still map the closed domain
// strictly inside itself.
DomainPoint moebius_apply(const Matrix& t, const Signature& sig,
                          const DomainPoint& m);
DomainPoint moebius_apply(const PseudoUnitary& t, const DomainPoint& m);

// D(z) = B(z)T_1 B(z)T_2 ... B(z)T_n.
Matrix product_eval(const ProductFamily& fam, Complex z);

struct FixedPointResult {
  DomainPoint m_star;  // the attracting fixed point M(z)
  int iterations;
  double residual;     // ||D(z).m_star - m_star||_F
  Matrix d_w;          // restriction of D(z) to the invariant subspace,
                       // in the basis columns of (M(z); 1_d)
  double log_abs_det;  // ln|det d_w|
};

// Iterates M <- D(z).M from M_0 = 0 until the successive change drops
// below tol. Requires |z| < 1 strictly; near the boundary the contraction
// degrades and max_iter may be hit (reported, never silent).
FixedPointResult fixed_point(const ProductFamily& fam, Complex z,
                             double tol = 1e-12, int max_iter = 100000);

// rho(Lambda^d t): product of the d largest eigenvalue magnitudes,
// counted with algebraic multiplicity.
double spectral_radius_wedge(const Matrix& t, int d);

// ln||Lambda^k t|| = sum of the top k log singular values.
double wedge_log_norm(const Matrix& t, int k);

struct MeanValueReport {
  double circle_mean;   // average of ln rho(Lambda^d D(r e^{2 pi i k/N}))
  double center_value;  // ln rho(Lambda^d D(0)) = sum_j N_d(T_j)
  double gap;
};

// Mean-value check for the harmonic function ln rho(Lambda^d D(z)) on the
// circle of the given radius. Nodes are reduced in index order so sums
// are bit-reproducible regardless of thread count.
MeanValueReport mean_value_check(const ProductFamily& fam, double radius,
                                 int n_points, int threads = 1);

}  // namespace ucd
