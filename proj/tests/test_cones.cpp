#include <doctest.h>

#include <algorithm>

#include "terracini/cones.hpp"
#include "terracini/errors.hpp"
#include "terracini/families.hpp"
#include "terracini/random.hpp"

using namespace terracini;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vec sdiag(std::initializer_list<double> xs) {
  Vec d = vec(xs);
  return svec(d.asDiagonal().toDenseMatrix());
}

}  // namespace

TEST_CASE("membership examples") {
  CHECK(membership(ConeModel::psd(2), sdiag({1, 1})));
  CHECK_FALSE(membership(ConeModel::psd(2), sdiag({1, -1})));
  ConeModel h = ConeModel::hyperbolicity(families::product(3), families::ones(3));
  CHECK_FALSE(membership(h, vec({1, -1, 1})));
  CHECK(membership(h, vec({1, 0, 2})));
  CHECK(membership(square_cone(), vec({0, 0, 1})));
  CHECK_FALSE(membership(square_cone(), vec({2, 0, 1})));
  CHECK_THROWS_AS(membership(ConeModel::veronese(3, 4), Vec::Zero(15)), Error);
}

TEST_CASE("linear image membership") {
  Mat b(2, 3);
  b << 1, -1, 0, 0, 0, 1;
  ConeModel c = ConeModel::linear_image(ConeModel::orthant_cone(3), b);
  CHECK(membership(c, vec({-5, 1})));
  CHECK_FALSE(membership(c, vec({1, -1})));
  Mat tr(1, 3);
  tr << 1, 0, 1;  // trace in svec coordinates of S^2
  ConeModel t = ConeModel::linear_image(ConeModel::psd(2), tr);
  CHECK(membership(t, vec({2})));
  CHECK_FALSE(membership(t, vec({-1})));
}

TEST_CASE("pointedness is enforced") {
  Mat g(2, 2);
  g << 1, -1, 0, 0;
  CHECK_THROWS_AS(ConeModel::polyhedral(g), Error);
  CHECK(is_pointed(square_cone().generators));
}

TEST_CASE("normal cone examples") {
  NormalCone n = normal_cone(ConeModel::psd(2), sdiag({1, 0}));
  REQUIRE(n.face.z.cols() == 1);
  CHECK(std::abs(std::abs(n.face.z(1, 0)) - 1.0) < 1e-12);
  CHECK(n.span().dim() == 1);
  CHECK(n.span().contains(sdiag({0, 1})));

  n = normal_cone(ConeModel::orthant_cone(3), vec({1, 0, 0}));
  CHECK(n.equalities.rows() == 1);
  CHECK(n.inequalities.rows() == 2);
  CHECK(n.span().dim() == 2);
  CHECK(n.span().contains(vec({0, 1, 1})));
  NegatedFace nf = n.negated_face();
  CHECK(nf.support == std::vector<int>{1, 2});

  n = normal_cone(ConeModel::psd(2), sdiag({1, 2}));
  CHECK(n.face.z.cols() == 0);
  CHECK(n.span().dim() == 0);
  CHECK_THROWS_AS(normal_cone(ConeModel::psd(2), sdiag({1, -1})), Error);
}

TEST_CASE("minimal face examples") {
  CHECK(minimal_face(ConeModel::orthant_cone(3), vec({1, 0, 2})).indices ==
        std::vector<int>{0, 2});
  FaceDescriptor f = minimal_face(ConeModel::psd(3), sdiag({1, 1, 0}));
  REQUIRE(f.z.cols() == 1);
  CHECK(std::abs(std::abs(f.z(2, 0)) - 1.0) < 1e-12);
  CHECK(minimal_face(square_cone(), vec({1, 1, 1})).indices == std::vector<int>{0});
  CHECK(minimal_face(square_cone(), vec({0, 0, 1})).indices.size() == 4);
  CHECK(minimal_face(square_cone(), vec({1, 0, 1})).indices == std::vector<int>{0, 1});
}

TEST_CASE("extreme ray examples") {
  Vec v = vec({1, 2, -1});
  CHECK(is_extreme_ray(ConeModel::psd(3), svec(v * v.transpose())));
  CHECK_FALSE(is_extreme_ray(ConeModel::psd(2), sdiag({1, 1})));
  CHECK(is_extreme_ray(square_cone(), vec({1, 1, 1})));
  CHECK_FALSE(is_extreme_ray(square_cone(), vec({0, 0, 1})));
  CHECK(is_extreme_ray(ConeModel::veronese(3, 4), veronese_phi(3, 4, vec({1, -2, 0.5}))));
  CHECK_FALSE(is_extreme_ray(ConeModel::veronese(2, 4),
                             veronese_phi(2, 4, vec({1, 0})) +
                                 veronese_phi(2, 4, vec({0, 1}))));
  ConeModel h = ConeModel::hyperbolicity(families::product(3), families::ones(3));
  CHECK_THROWS_AS(is_extreme_ray(h, vec({1, 0, 0})), Error);
}

TEST_CASE("chain reduction examples") {
  FaceChainReport r = chain_reduce(ConeModel::orthant_cone(3),
                                   {vec({1, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0})});
  CHECK(r.indices == std::vector<int>{0, 2});
  Vec e1 = vec({1, 0, 0}), e2 = vec({0, 1, 0}), e12 = vec({1, 1, 0});
  r = chain_reduce(ConeModel::psd(3), {svec(e1 * e1.transpose()), svec(e2 * e2.transpose()),
                                       svec(e12 * e12.transpose())});
  CHECK(r.indices == std::vector<int>{0, 1});
  r = chain_reduce(ConeModel::psd(3), {sdiag({1, 0, 0})});
  CHECK(r.indices == std::vector<int>{0});
}

TEST_CASE("chain reduction respects the face-lattice height") {
  Rng rng(3);
  ConeModel psd = ConeModel::psd(4);
  for (int t = 0; t < 10; ++t) {
    std::vector<Vec> pts;
    for (int i = 0; i < 8; ++i) {
      Vec v = rng.normal_vector(4);
      pts.push_back(svec(v * v.transpose()));
    }
    FaceChainReport r = chain_reduce(psd, pts);
    CHECK(r.height == 5);
    CHECK(static_cast<int>(r.indices.size()) <= r.height - 1);
    Vec all = Vec::Zero(10), part = Vec::Zero(10);
    for (const Vec& p : pts) all += p;
    for (int i : r.indices) part += pts[i];
    CHECK(minimal_face(psd, all).z.cols() == minimal_face(psd, part).z.cols());
  }
}

TEST_CASE("random polyhedral cones") {
  ConeModel a = random_polyhedral_cone(3, 4, 7), b = random_polyhedral_cone(3, 4, 7);
  CHECK(a.generators == b.generators);
  ConeModel c = random_polyhedral_cone(4, 8, 1);
  CHECK(c.generators.cols() == 8);
  // Gaussian generators can land inside the hull of the others, so
  // extremality is compared against a leave-one-out membership oracle.
  for (int seed = 1; seed <= 5; ++seed) {
    ConeModel r = random_polyhedral_cone(4, 8, seed);
    for (int j = 0; j < 8; ++j) {
      Mat others(4, 7);
      for (int i = 0, k = 0; i < 8; ++i)
        if (i != j) others.col(k++) = r.generators.col(i);
      const bool inside = membership(ConeModel::polyhedral(others), r.generators.col(j));
      CHECK(is_extreme_ray(r, r.generators.col(j)) == !inside);
    }
  }
}

TEST_CASE("minimal face agrees with per-generator LPs") {
  // Generator j is in the face of x iff max lambda_j over x = G lambda is > 0.
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    ConeModel c = random_polyhedral_cone(4, 7, 200 + t);
    const Mat& g = c.generators;
    Vec lam = Vec::Zero(7);
    for (int j = 0; j < 7; ++j)
      if (rng.uniform() < 0.35) lam(j) = 0.5 + rng.uniform();
    if (lam.sum() == 0) lam(1) = 1;
    Vec x = g * lam;
    std::vector<int> oracle;
    for (int j = 0; j < 7; ++j) {
      // maximize lambda_j s.t. G lambda = x, sum lambda + slack = bound
      LpProblem lp;
      lp.c = Vec::Zero(8);
      lp.c(j) = -1;
      lp.a = Mat::Zero(5, 8);
      lp.a.topLeftCorner(4, 7) = g;
      lp.a.row(4).setOnes();
      lp.b = Vec(5);
      lp.b.head(4) = x;
      lp.b(4) = 10 * lam.sum();
      lp.free.assign(8, false);
      SolveReport r = solve_lp(lp);
      REQUIRE(r.status == SolveStatus::optimal);
      if (-r.primal_objective > 1e-6) oracle.push_back(j);
    }
    CHECK(minimal_face(c, x).indices == oracle);
  }
}

TEST_CASE("points lie in the relative interior of their minimal face") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    ConeModel c = random_polyhedral_cone(4, 7, 100 + t);
    Vec lam = Vec::Zero(7);
    for (int j = 0; j < 7; ++j)
      if (rng.uniform() < 0.4) lam(j) = 1 + rng.uniform();
    if (lam.sum() == 0) lam(0) = 1;
    Vec x = c.generators * lam;
    FaceDescriptor f = minimal_face(c, x);
    for (int j = 0; j < 7; ++j)
      if (lam(j) > 0)
        CHECK(std::find(f.indices.begin(), f.indices.end(), j) != f.indices.end());
    // Same minimal face, same normal cone.
    Vec x2 = Vec::Zero(4);
    for (int j : f.indices) x2 += (0.5 + rng.uniform()) * c.generators.col(j);
    CHECK(minimal_face(c, x2).indices == f.indices);
    NormalCone n1 = normal_cone(c, x), n2 = normal_cone(c, x2);
    CHECK(n1.equalities == n2.equalities);
    CHECK(n1.inequalities == n2.inequalities);
  }
}

TEST_CASE("normal cone of a sum is the intersection") {
  Rng rng(5);
  ConeModel psd = ConeModel::psd(4);
  for (int t = 0; t < 10; ++t) {
    Vec u = rng.normal_vector(4), v = rng.normal_vector(4);
    Vec x = svec(u * u.transpose()), y = svec(v * v.transpose());
    Subspace nx = normal_cone(psd, x).span(), ny = normal_cone(psd, y).span();
    Subspace nsum = normal_cone(psd, x + y).span();
    CHECK(subspace_equal(subspace_intersection(nx, ny), nsum).equal);
  }
}

TEST_CASE("veronese coordinates") {
  Vec p = veronese_phi(2, 2, vec({1, 1}));
  CHECK(p == vec({1, 1, 1}));
  CHECK(veronese_phi(2, 4, vec({0, 0})).norm() == 0.0);
  CHECK(veronese_phi(2, 4, vec({1, 2})) == vec({1, 2, 4, 8, 16}));
  CHECK_THROWS_AS(veronese_phi(2, 3, vec({1, 2})), Error);
  CHECK(ConeModel::veronese(4, 4).ambient_dim() == 35);
  Vec z;
  CHECK(veronese_preimage(3, 4, veronese_phi(3, 4, vec({0.3, -1, 2})), &z));
  CHECK((veronese_phi(3, 4, z) - veronese_phi(3, 4, vec({0.3, -1, 2}))).norm() < 1e-10);
}
