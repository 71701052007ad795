#include <doctest.h>

#include <gmpxx.h>

#include <cmath>

#include "terracini/cones.hpp"
#include "terracini/errors.hpp"
#include "terracini/random.hpp"
#include "terracini/tangent.hpp"
#include "terracini/veronese.hpp"

using namespace terracini;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Exact rank of an integer matrix by fraction-free rational elimination.
int exact_rank(std::vector<std::vector<mpq_class>> m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

// Gradient constraint rows of degree-2d forms at integer points, exactly.
int exact_double_vanishing(const std::vector<Vec>& pts, int n, int two_d) {
  auto ex = graded_lex_exponents(n, two_d);
  std::vector<std::vector<mpq_class>> rows;
  for (const Vec& p : pts)
    for (int j = 0; j < n; ++j) {
      std::vector<mpq_class> row;
      for (const auto& a : ex) {
        mpq_class v = a[j];
        for (int i = 0; i < n && v != 0; ++i) {
          const int e = a[i] - (i == j ? 1 : 0);
          for (int t = 0; t < e; ++t) v *= static_cast<long>(std::lround(p(i)));
        }
        row.push_back(v);
      }
      rows.push_back(row);
    }
  return static_cast<int>(ex.size()) - exact_rank(rows);
}

}  // namespace

TEST_CASE("bombieri inner product") {
  CHECK(bombieri_inner(veronese_phi(3, 4, vec({1, 0, 0})), veronese_phi(3, 4, vec({1, 0, 0})), 3,
                       4) == doctest::Approx(1.0));
  CHECK(std::abs(bombieri_inner(veronese_phi(2, 2, vec({1, 1})), veronese_phi(2, 2, vec({1, -1})),
                                2, 2)) < 1e-15);
  CHECK_THROWS_AS(bombieri_inner(Vec::Zero(3), Vec::Zero(4), 2, 2), Error);

  Rng rng(17);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 3, two_d = 2 * (1 + t % 3);
    Vec y = rng.sphere(n), z = rng.sphere(n);
    const double want = std::pow(y.dot(z), two_d);
    const double got = bombieri_inner(veronese_phi(n, two_d, y), veronese_phi(n, two_d, z), n, two_d);
    worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-3));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("kw certificate") {
  KwCertificate c = kw_certificate_veronese({vec({1, 0})}, 2);
  // z2^2 (z1^2 + z2^2) in the order z1^4, z1^3 z2, z1^2 z2^2, z1 z2^3, z2^4.
  CHECK((c.coefficients - vec({0, 0, 1, 0, 1})).norm() < 1e-12);

  c = kw_certificate_veronese({vec({1, 0}), vec({0, 1})}, 2);
  Vec z = vec({1, 1}) / std::sqrt(2.0);
  CHECK(c.coefficients.dot(veronese_phi(2, 4, z)) == doctest::Approx(0.25));

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    std::vector<Vec> pts = {rng.sphere(3), rng.sphere(3)};
    KwCertificate k = kw_certificate_veronese(pts, 3);
    for (const Vec& p : pts) CHECK(std::abs(k.coefficients.dot(veronese_phi(3, 6, p))) <= 1e-12);
    for (int s = 0; s < 20; ++s) CHECK(k.coefficients.dot(veronese_phi(3, 6, rng.sphere(3))) > 0);
  }
  CHECK_THROWS_AS(kw_certificate_veronese({vec({1, 0}), vec({0, 1}), vec({1, 1})}, 2), Error);
}

TEST_CASE("growth and regularity estimates") {
  GrowthCertificate g = estimate_growth_constant({vec({1, 0})}, 2, 2, 2000, 0.5, 5);
  CHECK(g.mu >= g.analytic_bound);
  CHECK(g.analytic_bound == doctest::Approx(0.25 * (0.25 / 4)));
  CHECK(g.num_samples > 0);
  CHECK(g.mu >= 0.0);

  GrowthCertificate p = polyhedral_growth_certificate();
  CHECK(p.vacuous);
  CHECK(std::isinf(p.mu));
  CHECK(polyhedral_regularity_certificate().nu == 0.0);

  KwCertificate c = kw_certificate_veronese({vec({1, 0})}, 2);
  GrowthCertificate r = estimate_regularity(vec({1, 0}), c.coefficients, 2, 4, 1000, 0.5, 6);
  CHECK(std::isfinite(r.nu));
  CHECK(r.nu > 0.0);
  CHECK(estimate_regularity(vec({1, 0}), Vec::Zero(5), 2, 4, 100, 0.5, 6).nu == 0.0);
  CHECK_THROWS_AS(estimate_growth_constant({vec({1, 0})}, 2, 2, 10, -1.0, 5), Error);
}

TEST_CASE("double vanishing dimension") {
  CHECK(double_vanishing_dimension({vec({1, 2})}, 2, 2) == 1);
  CHECK(double_vanishing_dimension({}, 3, 4) == 15);
  CHECK(double_vanishing_dimension({vec({1, 0, 0}), vec({0, 1, 0})}, 3, 4) ==
        exact_double_vanishing({vec({1, 0, 0}), vec({0, 1, 0})}, 3, 4));

  const auto s = blekherman_s();
  REQUIRE(s.size() == 7);
  const int dim = double_vanishing_dimension(s, 4, 4);
  // The count 35 - 4|S| is only a lower bound; exact elimination decides.
  CHECK(dim >= 35 - 4 * 7);
  CHECK(dim == exact_double_vanishing(s, 4, 4));
  MESSAGE("double-vanishing quartics on the seven points: " << dim);

  const int sos = sos_vanishing_span(s, 4, 4).dim();
  CHECK(sos <= 6);
  CHECK(sos < dim);
}

TEST_CASE("veronese dual checks") {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    std::vector<Vec> zs = {rng.sphere(2), rng.sphere(2), rng.sphere(2)};
    TerraciniVerdict v = veronese_dual_check(2, 6, zs);
    CHECK(v.passed);
    CHECK(v.mode == VerdictMode::dual);
  }
  for (int t = 0; t < 5; ++t) {
    TerraciniVerdict v = veronese_dual_check(3, 4, {rng.sphere(3), rng.sphere(3)});
    CHECK(v.passed);
    CHECK(v.mode == VerdictMode::dual_sos_certified);
  }
  TerraciniVerdict b = veronese_dual_check(4, 4, blekherman_s());
  CHECK_FALSE(b.passed);
  CHECK(b.mode == VerdictMode::dual_inconclusive);
}
