#include <doctest.h>

#include <cmath>

#include "ucd/group.hpp"
#include "ucd/rng.hpp"

using namespace ucd;

namespace {

Matrix boost2(double gamma) {
  Matrix h(2, 2);
  h << std::cosh(gamma), std::sinh(gamma), std::sinh(gamma), std::cosh(gamma);
  return h;
}

PseudoUnitary boost11(double gamma) {
  return PseudoUnitary(boost2(gamma), Signature{1, 1});
}

}  // namespace

TEST_CASE("form_matrix") {
  Matrix g11 = form_matrix({1, 1});
  CHECK(g11(0, 0) == Complex(1, 0));
  CHECK(g11(1, 1) == Complex(-1, 0));
  Matrix g21 = form_matrix({2, 1});
  CHECK(g21(0, 0) == Complex(1, 0));
  CHECK(g21(1, 1) == Complex(1, 0));
  CHECK(g21(2, 2) == Complex(-1, 0));
  Matrix g12 = form_matrix({1, 2});
  CHECK(g12(1, 1) == Complex(-1, 0));
  CHECK(g12(2, 2) == Complex(-1, 0));
}

TEST_CASE("membership_defect") {
  CHECK(membership_defect(Matrix::Identity(2, 2), {1, 1}) == 0.0);
  // cosh^2 - sinh^2 = 1 makes the boost an exact group element.
  CHECK(membership_defect(boost2(std::log(2.0)), {1, 1}) < 1e-14);
  // 2*identity: defect ||diag(3,-3)||_F = 3 sqrt 2.
  CHECK(membership_defect(2.0 * Matrix::Identity(2, 2), {1, 1}) ==
        doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS(membership_defect(Matrix::Identity(3, 3), {1, 1}));
  CHECK_THROWS(PseudoUnitary(2.0 * Matrix::Identity(2, 2), Signature{1, 1}));
}

TEST_CASE("u_theta and b_z") {
  CHECK((u_theta({1, 1}, 0.0).mat() - Matrix::Identity(2, 2)).norm() == 0.0);

  const Matrix u_half = u_theta({1, 1}, 0.5).mat();
  CHECK(std::abs(u_half(0, 0) - Complex(-1, 0)) < 1e-15);
  CHECK(u_half(1, 1) == Complex(1, 0));

  const Matrix u_quarter = u_theta({2, 1}, 0.25).mat();
  CHECK(std::abs(u_quarter(0, 0) - Complex(0, 1)) < 1e-15);
  CHECK(std::abs(u_quarter(1, 1) - Complex(0, 1)) < 1e-15);
  CHECK(u_quarter(2, 2) == Complex(1, 0));

  CHECK((b_z({1, 1}, 1.0) - Matrix::Identity(2, 2)).norm() == 0.0);
  const Matrix b0 = b_z({1, 1}, 0.0);
  CHECK(b0(0, 0) == Complex(0, 0));
  CHECK(b0(1, 1) == Complex(1, 0));
  CHECK(b_z({1, 1}, Complex(0, 0.5))(0, 0) == Complex(0, 0.5));

  // B on the unit circle reproduces u_theta exactly by construction.
  for (double theta : {0.0, 0.125, 0.3, 0.77}) {
    const Matrix lhs = b_z({2, 1}, std::polar(1.0, 2 * M_PI * theta));
    CHECK((lhs - u_theta({2, 1}, theta).mat()).norm() == 0.0);
  }
}

TEST_CASE("n_r") {
  RngStream rng(3);
  const Matrix w = haar_unitary(4, rng);
  CHECK(std::abs(n_r(w, 2)) < 1e-13);
  CHECK(n_r(boost2(std::log(2.0)), 1) ==
        doctest::Approx(std::log(1.25)).epsilon(1e-12));
  Matrix sl = Matrix::Zero(2, 2);
  sl(0, 0) = 2.0;
  sl(1, 1) = 0.5;
  CHECK(n_r(sl, 1) == doctest::Approx(std::log(1.25)).epsilon(1e-12));
  CHECK_THROWS(n_r(Matrix::Zero(2, 2), 1));
  CHECK_THROWS(n_r(sl, 3));
}

TEST_CASE("hyperbolic_decompose examples") {
  // Identity in U(2,1).
  PseudoUnitary id(Matrix::Identity(3, 3), Signature{2, 1});
  auto dec = hyperbolic_decompose(id);
  CHECK(dec.gamma.size() == 1);
  CHECK(dec.gamma(0) == doctest::Approx(0.0));
  CHECK((assemble(dec, {2, 1}) - Matrix::Identity(3, 3)).norm() < 1e-13);

  // Boost in U(1,1): gamma = ln 2 recovered, reconstruction exact.
  auto hdec = hyperbolic_decompose(boost11(std::log(2.0)));
  CHECK(hdec.gamma(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK((assemble(hdec, {1, 1}) - boost2(std::log(2.0))).norm() < 1e-13);
}

TEST_CASE("hyperbolic_decompose round trip through the sampler oracle") {
  RngStream rng(101);
  const Signature sig{3, 2};
  HyperbolicDecomposition src;
  src.u1 = haar_unitary(3, rng);
  src.u2 = haar_unitary(2, rng);
  src.v1 = haar_unitary(3, rng);
  src.v2 = haar_unitary(2, rng);
  src.gamma = Eigen::Vector2d(1.0, 0.3);
  const Matrix t = assemble(src, sig);
  PseudoUnitary pu(t, sig);
  auto dec = hyperbolic_decompose(pu);
  CHECK(dec.gamma(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(dec.gamma(1) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK((assemble(dec, sig) - t).norm() <= 1e-9 * (1.0 + t.norm()));

  // |det D| = cosh(1.0) cosh(0.3), the determinant identity.
  const double dd = std::abs(d_block(pu).determinant());
  CHECK(dd == doctest::Approx(std::cosh(1.0) * std::cosh(0.3)).epsilon(1e-10));
  CHECK(dd == doctest::Approx(std::exp(n_r(t, 2))).epsilon(1e-9));
}

TEST_CASE("hyperbolic_decompose handles c < d by block swap") {
  RngStream rng(55);
  const Signature sig{2, 3};
  PseudoUnitary t = sample_pseudo_unitary(sig, 1.2, rng);
  auto dec = hyperbolic_decompose(t);
  CHECK(dec.gamma.size() == 2);
  CHECK(dec.gamma(0) >= dec.gamma(1));
  CHECK((assemble(dec, sig) - t.mat()).norm() <=
        1e-9 * (1.0 + t.mat().norm()));
  // gamma_i = ln sigma_i(T) for the top min(c,d) singular values.
  auto sv = svd(t.mat());
  for (int i = 0; i < 2; ++i) {
    CHECK(dec.gamma(i) == doctest::Approx(std::log(sv.sigma(i))).epsilon(1e-8));
  }
}

TEST_CASE("d_block examples") {
  PseudoUnitary id(Matrix::Identity(2, 2), Signature{1, 1});
  CHECK(std::abs(d_block(id).determinant()) == doctest::Approx(1.0));
  PseudoUnitary h = boost11(std::log(2.0));
  CHECK(std::abs(d_block(h)(0, 0)) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(std::abs(d_block(h).determinant()) ==
        doctest::Approx(std::exp(n_r(h.mat(), 1))).epsilon(1e-12));
}

TEST_CASE("sample_pseudo_unitary") {
  RngStream rng(7);
  // gamma_max = 0: block-diagonal unitary with N_d = 0.
  PseudoUnitary u = sample_pseudo_unitary({2, 2}, 0.0, rng);
  CHECK(std::abs(n_r(u.mat(), 2)) < 1e-12);
  CHECK((u.mat().adjoint() * u.mat() - Matrix::Identity(4, 4)).norm() < 1e-12);
  CHECK(u.mat().topRightCorner(2, 2).norm() < 1e-13);

  for (int trial = 0; trial < 10; ++trial) {
    PseudoUnitary t = sample_pseudo_unitary({3, 2}, 1.5, rng);
    CHECK(t.defect() <=
          1e-10 * (1.0 + t.mat().norm() * t.mat().norm()));
  }
}

TEST_CASE("pseudo-unitary structural invariants") {
  RngStream rng(19);
  for (const Signature sig : {Signature{1, 1}, Signature{2, 1}, Signature{2, 2},
                              Signature{3, 2}, Signature{1, 2}}) {
    for (int trial = 0; trial < 5; ++trial) {
      PseudoUnitary t = sample_pseudo_unitary(sig, 1.5, rng);
      auto sv = svd(t.mat());
      const int n = sig.size();
      const int m = std::min(sig.c, sig.d);
      // Reciprocal pairing and unit middle singular values.
      for (int i = 0; i < m; ++i) {
        CHECK(sv.sigma(i) * sv.sigma(n - 1 - i) ==
              doctest::Approx(1.0).epsilon(1e-8));
      }
      for (int i = m; i < n - m; ++i) {
        CHECK(sv.sigma(i) == doctest::Approx(1.0).epsilon(1e-8));
      }
      // |det D| = exp(N_d).
      const double dd = std::abs(d_block(t).determinant());
      CHECK(dd ==
            doctest::Approx(std::exp(n_r(t.mat(), sig.d))).epsilon(1e-9));
      // Sandwich: ln||Lambda^d T|| - d ln 2 <= N_d <= ln||Lambda^d T||.
      double wedge = 0.0;
      for (int i = 0; i < sig.d; ++i) wedge += std::log(sv.sigma(i));
      const double nd = n_r(t.mat(), sig.d);
      CHECK(nd <= wedge + 1e-12);
      CHECK(nd >= wedge - sig.d * std::log(2.0) - 1e-12);
      // Plateau: N_k = N_d for d <= k <= max(c,d).
      for (int k = sig.d; k <= std::max(sig.c, sig.d); ++k) {
        CHECK(n_r(t.mat(), k) == doctest::Approx(nd).epsilon(1e-8));
      }
      // Unitary conjugation invariance of N_r.
      RngStream wrng = rng.split(static_cast<std::uint64_t>(trial));
      const Matrix w = haar_unitary(n, wrng);
      CHECK(n_r(w * t.mat() * w.adjoint(), sig.d) ==
            doctest::Approx(nd).epsilon(1e-10));
    }
  }
}

TEST_CASE("group closure under products") {
  RngStream rng(29);
  const Signature sig{3, 2};
  PseudoUnitary a = sample_pseudo_unitary(sig, 1.0, rng);
  PseudoUnitary b = sample_pseudo_unitary(sig, 1.0, rng);
  // Certification of the product must succeed.
  PseudoUnitary prod(a.mat() * b.mat(), sig);
  CHECK(prod.defect() <= cert_threshold(prod.mat()));
}

TEST_CASE("conjugator_from_form") {
  const Matrix gcd = form_matrix({2, 1});
  auto std_spec = conjugator_from_form(gcd);
  CHECK(std_spec.sig.c == 2);
  CHECK(std_spec.sig.d == 1);
  CHECK((std_spec.conjugator_b - Matrix::Identity(3, 3)).norm() < 1e-13);

  // i*J has signature (1,1); check the conjugation identity, not the
  // (non-unique) factor itself.
  Matrix ij(2, 2);
  ij << 0.0, Complex(0, 1), Complex(0, -1), 0.0;
  auto spec = conjugator_from_form(ij);
  CHECK(spec.sig.c == 1);
  CHECK(spec.sig.d == 1);
  const Matrix back = spec.conjugator_b.adjoint() * form_matrix(spec.sig) *
                      spec.conjugator_b;
  CHECK((back - ij).norm() <= 1e-9 * (1.0 + ij.norm()));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 4.0;
  diag(1, 1) = -9.0;
  auto dspec = conjugator_from_form(diag);
  CHECK(std::abs(dspec.conjugator_b(0, 0)) == doctest::Approx(2.0));
  CHECK(std::abs(dspec.conjugator_b(1, 1)) == doctest::Approx(3.0));

  CHECK_THROWS(conjugator_from_form(Matrix::Zero(2, 2)));
}

TEST_CASE("cayley transform and rotations") {
  for (int d : {1, 2, 3}) {
    const Matrix c = cayley(d);
    CHECK((c.adjoint() * c - Matrix::Identity(2 * d, 2 * d)).norm() < 1e-14);
    // R_theta = e^{-i pi theta} C^* U_theta C.
    for (double theta : {0.0, 0.2, 0.5, 0.93}) {
      const Matrix lhs = r_theta(d, theta);
      const Matrix rhs = std::polar(1.0, -M_PI * theta) * c.adjoint() *
                         u_theta({d, d}, theta).mat() * c;
      CHECK((lhs - rhs).norm() < 1e-12);
    }
  }
  const Matrix r = r_theta(1, 0.5);
  CHECK(std::abs(r(0, 0)) < 1e-15);
  CHECK(r(0, 1).real() == doctest::Approx(-1.0));
  CHECK(r(1, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("embed_sl2 and hsp membership") {
  CHECK((embed_sl2(Eigen::Matrix2d::Identity()) - Matrix::Identity(2, 2))
            .norm() == 0.0);
  CHECK(hsp_defect(embed_sl2(Eigen::Matrix2d::Identity()), 1) == 0.0);

  Eigen::Matrix2d a;
  a << 2.0, 0.0, 0.0, 0.5;
  CHECK(hsp_defect(embed_sl2(a), 1) < 1e-14);

  Eigen::Matrix2d bad;
  bad << 2.0, 0.0, 0.0, 2.0;
  CHECK_THROWS(embed_sl2(bad));
}

TEST_CASE("cayley-conjugated HSp elements certify in U(d,d)") {
  RngStream rng(41);
  const int d = 2;
  const Matrix c = cayley(d);
  // Sample in U(d,d) and pull back: C^* U(d,d) C = HSp(2d).
  for (int trial = 0; trial < 5; ++trial) {
    PseudoUnitary u = sample_pseudo_unitary({d, d}, 1.0, rng);
    const Matrix h = c.adjoint() * u.mat() * c;
    CHECK(hsp_defect(h, d) <= 1e-9 * (1.0 + h.norm() * h.norm()));
    // Cayley bridge between the two membership defects.
    CHECK(hsp_defect(h, d) ==
          doctest::Approx(membership_defect(c * h * c.adjoint(), {d, d}))
              .epsilon(1e-10));
  }
}

TEST_CASE("schrodinger_transfer") {
  // d=1, T=1, V=0, E=0: the quarter rotation.
  const Matrix t0 = schrodinger_transfer(Matrix::Identity(1, 1),
                                         Matrix::Zero(1, 1), 0.0);
  CHECK(std::abs(t0(0, 0)) == 0.0);
  CHECK(t0(0, 1).real() == doctest::Approx(-1.0));
  CHECK(t0(1, 0).real() == doctest::Approx(1.0));
  CHECK(hsp_defect(t0, 1) == 0.0);

  // E = 3: N_1 = ln((sigma_1 + 1/sigma_1)/2) with sigma_1^2 = (11+sqrt(117))/2.
  const Matrix t3 = schrodinger_transfer(Matrix::Identity(1, 1),
                                         Matrix::Zero(1, 1), 3.0);
  CHECK(t3(0, 0).real() == doctest::Approx(3.0));
  const double s1 = std::sqrt((11.0 + std::sqrt(117.0)) / 2.0);
  const double expected = std::log(0.5 * (s1 + 1.0 / s1));
  CHECK(n_r(t3, 1) == doctest::Approx(expected).epsilon(1e-12));

  // d=2, T=1, V=0, E=0 gives the block pattern [[0,-1],[1,0]] (a unitary
  // group element, so L^2 of the constant cocycle vanishes).
  const Matrix j = schrodinger_transfer(Matrix::Identity(2, 2),
                                        Matrix::Zero(2, 2), 0.0);
  CHECK((j + symplectic_form(2)).norm() == 0.0);
  CHECK(hsp_defect(j, 2) == 0.0);

  CHECK_THROWS(schrodinger_transfer(Matrix::Zero(1, 1), Matrix::Zero(1, 1), 0.0));
}
