#pragma once

// Structure of the pseudo-unitary group U(c,d), the hermitian-symplectic
// group HSp(2d), and groups preserving a general non-degenerate hermitian
// form. Membership is certified numerically at construction; the
// hyperbolic decomposition T = diag(U1,U2) K(Gamma) diag(V1,V2) is the
// signature-respecting analogue of the SVD and drives everything else.

#include <Eigen/Dense>

#include "ucd/numkernel.hpp"
#include "ucd/rng.hpp"

namespace ucd {

struct Signature {
  int c;  // positive eigenvalues of the form
  int d;  // negative eigenvalues
  int size() const { return c + d; }
};

inline bool operator==(const Signature& a, const Signature& b) {
  return a.c == b.c && a.d == b.d;
}

// The standard form G_{c,d} = diag(1_c, -1_d).
Matrix form_matrix(const Signature& sig);

// ||t^* G t - G||_F for the standard form of the given signature.
double membership_defect(const Matrix& t, const Signature& sig);

// Certification threshold: defect <= kCertFactor * (1 + ||t||_F^2).
// Quadratic scaling because the defect form is quadratic in t.
inline constexpr double kCertFactor = 1e-8;

inline double cert_threshold(const Matrix& t) {
  const double f = t.norm();
  return kCertFactor * (1.0 + f * f);
}

// A matrix certified (within tolerance) to lie in U(c,d).
class PseudoUnitary {
 public:
  PseudoUnitary(Matrix t, Signature sig);

  const Matrix& mat() const { return mat_; }
  const Signature& sig() const { return sig_; }
  double defect() const { return defect_; }

 private:
  Matrix mat_;
  Signature sig_;
  double defect_;
};

// U_theta = diag(e^{2 pi i theta} 1_c, 1_d): the one-parameter unitary
// family being averaged over.
PseudoUnitary u_theta(const Signature& sig, double theta);

// B(z) = diag(z 1_c, 1_d); B(e^{2 pi i theta}) reproduces u_theta exactly.
Matrix b_z(const Signature& sig, Complex z);

// N_r(t) = sum_{i<=r} ln((sigma_i + 1/sigma_i)/2). Always >= 0; requires
// invertible t.
double n_r(const Matrix& t, int r);

struct HyperbolicDecomposition {
  Matrix u1, u2;         // unitary, c x c and d x d
  Matrix v1, v2;         // unitary, c x c and d x d
  Eigen::VectorXd gamma; // descending, >= 0, length min(c,d)
};

// Middle factor K(gamma): A = cosh padded with identity, off-diagonal
// blocks carry sinh in the top-left corner. Valid for any signature.
Matrix hyperbolic_middle(const Eigen::VectorXd& gamma, const Signature& sig);

// diag(u1,u2) * K(gamma) * diag(v1,v2).
Matrix assemble(const HyperbolicDecomposition& dec, const Signature& sig);

// Factorization of a certified matrix per the hyperbolic normal form.
// Gamma is unique; the unitary factors are not (no phase convention is
// imposed), so only gamma and reconstructions should be compared.
HyperbolicDecomposition hyperbolic_decompose(const PseudoUnitary& t);

// Lower-right d x d block; invertible for certified inputs since its
// singular values are cosh(gamma_i) >= 1.
Matrix d_block(const PseudoUnitary& t);

// Haar-distributed unitary: QR of a standard complex Gaussian with the
// positive-diagonal phase fix.
Matrix haar_unitary(int n, RngStream& rng);

// Random element assembled from Haar unitary factors and gamma_i i.i.d.
// uniform(0, gamma_max), sorted descending.
PseudoUnitary sample_pseudo_unitary(const Signature& sig, double gamma_max,
                                    RngStream& rng);

struct HermitianFormSpec {
  Matrix g;             // the form
  Signature sig;        // eigenvalue sign counts
  Matrix conjugator_b;  // invertible, g = b^* G_{c,d} b
};

// Reduces an arbitrary invertible hermitian form to the standard one via
// b = |Lambda|^{1/2} Q^* with g = Q Lambda Q^* (eigenvalues descending, so
// positives come first without an extra permutation).
HermitianFormSpec conjugator_from_form(const Matrix& g);

// ---- hermitian-symplectic group ----

// J = [[0, 1_d], [-1_d, 0]].
Matrix symplectic_form(int d);

// ||t^* J t - J||_F.
double hsp_defect(const Matrix& t, int d);

// Cayley transform C = (1/sqrt 2) [[1, i1],[1, -i1]]; unitary, conjugates
// HSp(2d) onto U(d,d).
Matrix cayley(int d);

// R_theta = e^{-i pi theta} C^* U_theta^{(d,d)} C, the block rotation
// playing the role of u_theta for HSp(2d).
Matrix r_theta(int d, double theta);

// SL(2,R) sits inside HSp(2); requires |det a - 1| <= 1e-10.
Matrix embed_sl2(const Eigen::Matrix2d& a);

// Transfer matrix of a block-Jacobi (strip Schroedinger) operator at
// energy e: [[(E-V) T^{-1}, -T^*], [T^{-1}, 0]]. Lies in HSp(2d).
Matrix schrodinger_transfer(const Matrix& t_hop, const Matrix& v, double e);

}  // namespace ucd
