#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "terracini/errors.hpp"
#include "terracini/families.hpp"
#include "terracini/hyperbolic.hpp"
#include "terracini/random.hpp"

using namespace terracini;
namespace fam = terracini::families;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vec diag_entries(std::initializer_list<double> xs) {
  Vec d = vec(xs);
  return fam::entries_from_matrix(d.asDiagonal().toDenseMatrix());
}

}  // namespace

TEST_CASE("restriction examples") {
  SparsePoly p = fam::product(3);
  std::vector<double> c = restrict_univariate(p, vec({-3, -1, -2}), fam::ones(3));
  // (t-3)(t-1)(t-2) = t^3 - 6t^2 + 11t - 6
  REQUIRE(c.size() == 4);
  CHECK(c[0] == doctest::Approx(-6));
  CHECK(c[1] == doctest::Approx(11));
  CHECK(c[2] == doctest::Approx(-6));
  CHECK(c[3] == doctest::Approx(1));
  std::vector<double> z = restrict_univariate(p, vec({1, 2, 3}), Vec::Zero(3));
  CHECK(z[0] == doctest::Approx(6));
  for (std::size_t j = 1; j < z.size(); ++j) CHECK(z[j] == 0.0);
}

TEST_CASE("det3 restriction is the characteristic polynomial") {
  Rng rng(1);
  Mat a = rng.normal_matrix(3, 3);
  Mat m = a + a.transpose();
  std::vector<double> c = restrict_univariate(
      fam::sym_det(3), fam::entries_from_matrix(-m), fam::identity_entries(3));
  // det(tI - M) = t^3 - tr(M) t^2 + c2 t - det(M)
  double c2 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) c2 += m(i, i) * m(j, j) - m(i, j) * m(i, j);
  CHECK(c[3] == doctest::Approx(1));
  CHECK(c[2] == doctest::Approx(-m.trace()));
  CHECK(c[1] == doctest::Approx(c2));
  CHECK(c[0] == doctest::Approx(-m.determinant()));
}

TEST_CASE("spectrum examples") {
  HyperbolicSpectrum s = hyperbolic_eigenvalues(fam::product(3), fam::ones(3),
                                                vec({3, 1, 2}));
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(s.eigenvalues[0] == doctest::Approx(3));
  CHECK(s.eigenvalues[1] == doctest::Approx(2));
  CHECK(s.eigenvalues[2] == doctest::Approx(1));
  CHECK(s.rank == 3);
  CHECK(s.mult == 0);

  Vec x(3);
  x << 2, 1, 2;
  s = hyperbolic_eigenvalues(fam::sym_det(2), fam::identity_entries(2), x);
  CHECK(s.eigenvalues[0] == doctest::Approx(3));
  CHECK(s.eigenvalues[1] == doctest::Approx(1));

  s = hyperbolic_eigenvalues(fam::elementary_symmetric(3, 2), fam::ones(3),
                             vec({1, 1, 0}));
  CHECK(s.eigenvalues[0] == doctest::Approx(1));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("spectrum needs p(e) > 0") {
  CHECK_THROWS_AS(hyperbolic_eigenvalues(fam::product(3), -fam::ones(3),
                                         fam::ones(3)),
                  Error);
}

TEST_CASE("repeated eigenvalues are not mistaken for complex ones") {
  SparsePoly p = fam::sym_det(4);
  Vec e = fam::identity_entries(4);
  HyperbolicSpectrum s = hyperbolic_eigenvalues(p, e, 2.5 * e);
  for (double v : s.eigenvalues) CHECK(v == doctest::Approx(2.5));
  s = hyperbolic_eigenvalues(p, e, diag_entries({1, 0, 0, 0}));
  CHECK(s.mult == 3);
  CHECK(s.rank == 1);
}

TEST_CASE("hyperbolicity checks") {
  CHECK(check_hyperbolic(fam::product(3), fam::ones(3), 200, 1).hyperbolic);
  SparsePoly circ = parse_poly("x1^2 + x2^2", 2);
  CHECK_FALSE(check_hyperbolic(circ, vec({1, 0}), 50, 2).hyperbolic);
  CHECK(check_hyperbolic(fam::elementary_symmetric(4, 2), fam::ones(4), 1000, 3)
            .hyperbolic);
}

TEST_CASE("spectrum shift property") {
  Rng rng(11);
  SparsePoly p = fam::sym_det(3);
  Vec e = fam::identity_entries(3);
  for (int s = 0; s < 20; ++s) {
    Vec x = rng.normal_vector(6);
    const double c = rng.normal();
    HyperbolicSpectrum a = hyperbolic_eigenvalues(p, e, x);
    HyperbolicSpectrum b = hyperbolic_eigenvalues(p, e, x + c * e);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(b.eigenvalues[i] - a.eigenvalues[i] - c) <= 1e-8);
  }
}

TEST_CASE("determinant spectrum equals matrix eigenvalues") {
  Rng rng(12);
  for (int d = 2; d <= 5; ++d) {
    Mat a = rng.normal_matrix(d, d);
    Mat m = a + a.transpose();
    HyperbolicSpectrum s = hyperbolic_eigenvalues(
        fam::sym_det(d), fam::identity_entries(d), fam::entries_from_matrix(m));
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    for (int i = 0; i < d; ++i)
      CHECK(s.eigenvalues[i] == doctest::Approx(es.eigenvalues()(d - 1 - i)));
  }
}

TEST_CASE("product spectrum is the sorted coordinates to full precision") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 7;
    Vec x = rng.normal_vector(n);
    HyperbolicSpectrum s = hyperbolic_eigenvalues(fam::product(n), fam::ones(n), x);
    std::vector<double> want(x.data(), x.data() + n);
    std::sort(want.rbegin(), want.rend());
    REQUIRE(s.eigenvalues.size() == want.size());
    for (int i = 0; i < n; ++i) CHECK(std::abs(s.eigenvalues[i] - want[i]) <= 1e-12);
  }
}

TEST_CASE("Descartes membership agrees with eigenvalue membership") {
  struct Cone {
    SparsePoly p;
    Vec e;
  };
  std::vector<Cone> cones = {{fam::product(3), fam::ones(3)},
                             {fam::elementary_symmetric(4, 2), fam::ones(4)},
                             {fam::sym_det(3), fam::identity_entries(3)}};
  Rng rng(13);
  for (const Cone& c : cones) {
    int agree = 0;
    for (int s = 0; s < 1000; ++s) {
      Vec x = rng.normal_vector(c.p.num_vars()) + 0.5 * c.e;
      agree += descartes_membership(c.p, c.e, x) ==
               eigenvalue_membership(c.p, c.e, x);
    }
    CHECK(agree == 1000);
  }
}

TEST_CASE("localization examples") {
  SparsePoly p = fam::product(3);
  Localization l = localize(p, vec({1, 1, 0}));
  CHECK(l.mult == 1);
  CHECK(l.poly == SparsePoly::variable(3, 2));
  l = localize(p, vec({1, 0, 0}));
  CHECK(l.mult == 2);
  CHECK(l.poly == SparsePoly::variable(3, 1) * SparsePoly::variable(3, 2));
  l = localize(p, vec({1, 2, 3}));
  CHECK(l.mult == 0);
}

TEST_CASE("localization of det at diag(Z, 0)") {
  // X = diag(2, 3, 0, 0): loc = det(Z) det(Y22) with Y22 the lower 2x2 block.
  SparsePoly p = fam::sym_det(4);
  Localization l = localize(p, diag_entries({2, 3, 0, 0}));
  CHECK(l.mult == 2);
  Rng rng(14);
  for (int s = 0; s < 5; ++s) {
    Mat a = rng.normal_matrix(4, 4);
    Mat y = a + a.transpose();
    const double expect = 6.0 * y.bottomRightCorner(2, 2).determinant();
    CHECK(l.poly.eval(fam::entries_from_matrix(y)) == doctest::Approx(expect));
  }
}

TEST_CASE("localization at a scaled point has a consistent degree") {
  SparsePoly p = fam::sym_det(3);
  Localization l = localize(p, diag_entries({1e3, 0, 0}));
  CHECK(l.mult == 2);
  Localization again = localize(l.poly, Vec::Zero(6));
  CHECK(again.mult == l.poly.degree());
}

TEST_CASE("lineality space examples") {
  CHECK(lineality_space(fam::product(3), fam::ones(3)).dim() == 0);
  Subspace s = lineality_space(SparsePoly::variable(3, 2), fam::ones(3));
  CHECK(s.dim() == 2);
  CHECK(s.contains(vec({1, 0, 0})));
  CHECK(s.contains(vec({0, 1, 0})));
  // loc(det2, diag(1, 0)) = y22; lineality {Q : Q22 = 0}
  Localization l = localize(fam::sym_det(2), diag_entries({1, 0}));
  s = lineality_space(l.poly, fam::identity_entries(2));
  CHECK(s.dim() == 2);
  CHECK(s.contains(vec({1, 0, 0})));
  CHECK(s.contains(vec({0, 1, 0})));
}

TEST_CASE("lineality of a localized determinant") {
  // loc(det4, diag(1,1,0,0)) = det(Y22); lineality = {Y : Y22 = 0}, dim 10-3.
  Localization l = localize(fam::sym_det(4), diag_entries({1, 1, 0, 0}));
  Subspace s = lineality_space(l.poly, fam::identity_entries(4));
  CHECK(s.dim() == 7);
}

TEST_CASE("lineality is preserved by derivative relaxation for degree >= 3") {
  struct Case {
    SparsePoly p;
    Vec e;
  };
  std::vector<Case> cases = {{fam::product(4), fam::ones(4)},
                             {fam::sym_det(3), fam::identity_entries(3)}};
  for (const Case& c : cases) {
    Subspace a = lineality_space(c.p, c.e);
    Subspace b = lineality_space(derivative_relaxation(c.p, c.e, c.e), c.e);
    CHECK(subspace_equal(a, b).equal);
  }
  // A cone with a lineality space: x1 x2 x3 viewed in 4 variables.
  SparsePoly q = parse_poly("x1 x2 x3", 4);
  Vec e = fam::ones(4);
  Subspace a = lineality_space(q, e);
  CHECK(a.dim() == 1);
  CHECK(subspace_equal(a, lineality_space(derivative_relaxation(q, e, e), e)).equal);
}

TEST_CASE("derivative relaxation examples") {
  for (int d = 3; d <= 6; ++d) {
    SparsePoly p = fam::product(d);
    CHECK(derivative_relaxation(p, fam::ones(d), fam::ones(d)) ==
          fam::elementary_symmetric(d, d - 1));
  }
  // Iterating l times gives l! e_{d-l}.
  SparsePoly q = fam::product(5);
  for (int l = 1; l <= 3; ++l) {
    q = derivative_relaxation(q, fam::ones(5), fam::ones(5));
    mpq_class f = 1;
    for (int i = 2; i <= l; ++i) f *= i;
    CHECK(q == fam::elementary_symmetric(5, 5 - l).scaled(f));
  }
  CHECK_THROWS_AS(derivative_relaxation(fam::product(3), fam::ones(3),
                                        vec({1, 0, 1})),
                  Error);
}

TEST_CASE("derivative of det3 along I has the second elementary symmetric spectrum") {
  SparsePoly q = derivative_relaxation(fam::sym_det(3), fam::identity_entries(3),
                                       fam::identity_entries(3));
  Rng rng(15);
  for (int s = 0; s < 5; ++s) {
    Mat a = rng.normal_matrix(3, 3);
    Mat m = a + a.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    Vec l = es.eigenvalues();
    // roots of e2(t - l) = 3t^2 - 2 e1(l) t + e2(l)
    const double e1 = l.sum();
    const double e2 = l(0) * l(1) + l(0) * l(2) + l(1) * l(2);
    const double disc = std::sqrt(4 * e1 * e1 - 12 * e2);
    HyperbolicSpectrum sp = hyperbolic_eigenvalues(q, fam::identity_entries(3),
                                                   fam::entries_from_matrix(m));
    CHECK(sp.eigenvalues[0] == doctest::Approx((2 * e1 + disc) / 6));
    CHECK(sp.eigenvalues[1] == doctest::Approx((2 * e1 - disc) / 6));
  }
}

TEST_CASE("multiplicity drop under derivative relaxation") {
  CHECK(verify_mult3(fam::product(5), fam::ones(5), fam::ones(5),
                     vec({1, 1, 0, 0, 0})));
  CHECK(verify_mult3(fam::sym_det(5), fam::identity_entries(5),
                     fam::identity_entries(5), diag_entries({1, 1, 0, 0, 0})));
  CHECK_THROWS_AS(verify_mult3(fam::product(5), fam::ones(5), fam::ones(5),
                               fam::ones(5)),
                  Error);
}

TEST_CASE("localization commutes with derivatives") {
  TangentDerivativeReport r = verify_tangent_derivative(
      fam::product(4), fam::ones(4), fam::ones(4), vec({1, 0, 0, 0}), 50, 1);
  CHECK(r.mult == 3);
  CHECK(r.symbolic_equal);
  CHECK(r.passed);

  r = verify_tangent_derivative(fam::sym_det(4), fam::identity_entries(4),
                                fam::identity_entries(4),
                                diag_entries({1, 0, 0, 0}), 50, 2);
  CHECK(r.mult == 3);
  CHECK(r.lineality_checked);
  CHECK(r.lineality_equal);
  CHECK(r.passed);

  CHECK_THROWS_AS(verify_tangent_derivative(fam::product(4), fam::ones(4),
                                            fam::ones(4), fam::ones(4), 5, 3),
                  Error);
}

TEST_CASE("eigencurve derivatives match the localized spectrum") {
  EigenCurveSample s = eigencurve_derivatives(fam::product(3), fam::ones(3),
                                              vec({1, 1, 0}), vec({0, 0, 2}));
  REQUIRE(s.derivatives.size() == 1);
  CHECK(s.derivatives[0] == doctest::Approx(2).epsilon(1e-6));
  CHECK(s.loc_spectrum[0] == doctest::Approx(2));

  Vec y(3);
  y << 0, 0, 3;
  s = eigencurve_derivatives(fam::sym_det(2), fam::identity_entries(2),
                             diag_entries({1, 0}), y);
  CHECK(s.derivatives[0] == doctest::Approx(3).epsilon(1e-6));

  Rng rng(16);
  for (int t = 0; t < 5; ++t) {
    Vec yy = rng.normal_vector(6);
    s = eigencurve_derivatives(fam::sym_det(3), fam::identity_entries(3),
                               diag_entries({1, 0, 0}), yy);
    CHECK(s.derivatives.size() == 2);
    CHECK(s.max_discrepancy <= 1e-4);
  }
}

TEST_CASE("boundary points have multiplicity one") {
  Rng rng(17);
  SparsePoly p = fam::elementary_symmetric(5, 3);
  Vec e = fam::ones(5);
  for (int t = 0; t < 10; ++t) {
    Vec g = rng.normal_vector(5);
    Vec x = g + (1.0 - hyperbolic_eigenvalues(p, e, g).min()) * e;
    Vec b = boundary_point(p, e, x);
    HyperbolicSpectrum s = hyperbolic_eigenvalues(p, e, b);
    CHECK(std::abs(s.min()) <= 1e-10 * (1 + s.max_abs()));
    CHECK(s.mult == 1);
  }
}
