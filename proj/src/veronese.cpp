#include "terracini/veronese.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "terracini/errors.hpp"
#include "terracini/kernels.hpp"
#include "terracini/random.hpp"

namespace terracini {

namespace {

std::map<std::vector<int>, int> index_of(int n, int degree) {
  std::map<std::vector<int>, int> idx;
  auto ex = graded_lex_exponents(n, degree);
  for (int i = 0; i < static_cast<int>(ex.size()); ++i) idx[ex[i]] = i;
  return idx;
}

double bombieri_dist(const Vec& a, const Vec& b, int n, int two_d) {
  Vec diff = a - b;
  return std::sqrt(std::max(0.0, bombieri_inner(diff, diff, n, two_d)));
}

SparsePoly squared_norm(int n) {
  SparsePoly s(n);
  for (int i = 0; i < n; ++i) s = s + SparsePoly::variable(n, i).pow(2);
  return s;
}

Vec coefficients_of(const SparsePoly& q, int n, int degree) {
  auto idx = index_of(n, degree);
  Vec out = Vec::Zero(idx.size());
  for (const auto& [e, c] : q.terms()) out(idx.at(e)) = c.get_d();
  return out;
}

}  // namespace

Vec bombieri_weights(int n, int two_d) {
  auto ex = graded_lex_exponents(n, two_d);
  Vec w(ex.size());
  const double top = std::lgamma(two_d + 1.0);
  for (std::size_t k = 0; k < ex.size(); ++k) {
    double l = top;
    for (int a : ex[k]) l -= std::lgamma(a + 1.0);
    w(k) = std::round(std::exp(l));
  }
  return w;
}

double bombieri_inner(const Vec& u, const Vec& v, int n, int two_d) {
  Vec w = bombieri_weights(n, two_d);
  require(u.size() == w.size() && v.size() == w.size(),
          "coefficient vectors have the wrong length");
  return kernels::weighted_dot(w.data(), u.data(), v.data(), w.size());
}

KwCertificate kw_certificate_veronese(const std::vector<Vec>& points, int d) {
  require(!points.empty(), "certificate needs at least one point");
  if (static_cast<int>(points.size()) > d)
    fail(ErrorKind::domain, "at most d points are allowed");
  const int n = static_cast<int>(points[0].size());
  SparsePoly nz = squared_norm(n);
  SparsePoly form = SparsePoly::constant(n, 1);
  for (const Vec& p : points) {
    require(p.size() == n, "points must share a dimension");
    SparsePoly lin = SparsePoly::linear_form(p);
    mpq_class pn = exact(p.squaredNorm());
    form = form * (nz.scaled(pn) - lin * lin);
  }
  form = form * nz.pow(d - static_cast<int>(points.size()));
  KwCertificate cert{form, coefficients_of(form, n, 2 * d)};

  Rng rng(0x5eed);
  for (const Vec& p : points)
    if (form.eval(p.normalized()) > 1e-10)
      fail(ErrorKind::numerical, "certificate does not vanish at its points");
  for (int s = 0; s < 100; ++s) {
    Vec z = rng.sphere(n);
    if (!(form.eval(z) > 0.0))
      fail(ErrorKind::numerical, "certificate is not positive off its points");
  }
  return cert;
}

GrowthCertificate estimate_growth_constant(const std::vector<Vec>& points, int d,
                                           int n, int num_samples,
                                           double epsilon, std::uint64_t seed) {
  require(epsilon > 0.0, "epsilon must be positive");
  const int two_d = 2 * d;
  std::vector<Vec> unit;
  for (const Vec& p : points) unit.push_back(p.normalized());
  KwCertificate cert = kw_certificate_veronese(unit, d);
  std::vector<Vec> images;
  for (const Vec& p : unit) images.push_back(veronese_phi(n, two_d, p));

  GrowthCertificate out;
  out.epsilon = epsilon;
  out.mu = std::numeric_limits<double>::infinity();
  out.analytic_bound =
      (1.0 / two_d) * std::pow(epsilon * epsilon / two_d, d - 1);
  Rng rng(seed);
  int attempts = 0;
  while (out.num_samples < num_samples) {
    if (++attempts > 10 * num_samples)
      fail(ErrorKind::numerical, "no samples landed in the epsilon neighborhood");
    const Vec& base = unit[rng.uniform_int(0, static_cast<int>(unit.size()) - 1)];
    Vec z = (base + epsilon * rng.uniform() * rng.sphere(n)).normalized();
    Vec x = veronese_phi(n, two_d, z);
    double dist = std::numeric_limits<double>::infinity();
    for (const Vec& y : images) dist = std::min(dist, bombieri_dist(x, y, n, two_d));
    if (dist > epsilon) continue;
    ++out.num_samples;
    if (dist < 1e-9) continue;  // removable 0/0
    out.mu = std::min(out.mu, cert.coefficients.dot(x) / (dist * dist));
  }
  out.min_ratio_observed = out.mu;
  return out;
}

GrowthCertificate polyhedral_growth_certificate() {
  GrowthCertificate g;
  g.mu = std::numeric_limits<double>::infinity();
  g.min_ratio_observed = g.mu;
  g.vacuous = true;
  return g;
}

GrowthCertificate polyhedral_regularity_certificate() {
  GrowthCertificate g;
  g.vacuous = true;
  return g;
}

GrowthCertificate estimate_regularity(const Vec& z0, const Vec& ell, int n,
                                      int two_d, int num_samples, double delta,
                                      std::uint64_t seed) {
  require(delta > 0.0, "delta must be positive");
  GrowthCertificate out;
  out.delta = delta;
  const Vec u0 = z0.normalized();
  const Vec x0 = veronese_phi(n, two_d, u0);
  require(ell.size() == x0.size(), "functional has the wrong length");
  if (ell.dot(x0) > 1e-10) fail(ErrorKind::domain, "functional does not vanish at x0");
  if (ell.norm() == 0.0) return out;
  Rng rng(seed);
  int attempts = 0;
  while (out.num_samples < num_samples) {
    if (++attempts > 10 * num_samples)
      fail(ErrorKind::numerical, "no samples landed in the delta neighborhood");
    Vec z = (u0 + delta * rng.uniform() * rng.sphere(n)).normalized();
    Vec x = veronese_phi(n, two_d, z);
    const double dist = bombieri_dist(x, x0, n, two_d);
    if (dist > delta) continue;
    ++out.num_samples;
    const double val = ell.dot(x);
    if (val < -1e-10) fail(ErrorKind::domain, "functional is negative on the cone");
    if (dist < 1e-9) continue;
    out.nu = std::max(out.nu, val / (dist * dist));
  }
  out.min_ratio_observed = out.nu;
  return out;
}

Subspace double_vanishing_space(const std::vector<Vec>& points, int n, int two_d) {
  auto ex = graded_lex_exponents(n, two_d);
  const int dim = static_cast<int>(ex.size());
  if (points.empty()) return Subspace::whole(dim);
  Mat rows(n * points.size(), dim);
  int r = 0;
  for (const Vec& p0 : points) {
    require(p0.size() == n && p0.norm() > 0, "points must be nonzero vectors in R^n");
    const Vec p = p0.normalized();
    for (int j = 0; j < n; ++j, ++r)
      for (int k = 0; k < dim; ++k) {
        if (ex[k][j] == 0) {
          rows(r, k) = 0.0;
          continue;
        }
        double v = ex[k][j];
        for (int i = 0; i < n; ++i)
          v *= std::pow(p(i), ex[k][i] - (i == j ? 1 : 0));
        rows(r, k) = v;
      }
  }
  return null_space(rows);
}

int double_vanishing_dimension(const std::vector<Vec>& points, int n, int two_d) {
  return double_vanishing_space(points, n, two_d).dim();
}

Subspace sos_vanishing_span(const std::vector<Vec>& points, int n, int two_d) {
  const int d = two_d / 2;
  auto half = graded_lex_exponents(n, d);
  auto full = index_of(n, two_d);
  const int nd = static_cast<int>(half.size());
  Mat m(nd, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec p = points[i].normalized();
    for (int k = 0; k < nd; ++k) {
      double v = 1.0;
      for (int j = 0; j < n; ++j) v *= std::pow(p(j), half[k][j]);
      m(k, i) = v;
    }
  }
  Subspace u = points.empty() ? Subspace::whole(nd) : Subspace::span(m).complement();
  const int r = u.dim();
  std::vector<Vec> prods;
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) {
      Vec c = Vec::Zero(full.size());
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          std::vector<int> e(n);
          for (int t = 0; t < n; ++t) e[t] = half[i][t] + half[j][t];
          c(full.at(e)) += u.basis()(i, a) * u.basis()(j, b);
        }
      prods.push_back(c);
    }
  return Subspace::span(prods, static_cast<int>(full.size()));
}

std::vector<Vec> blekherman_s() {
  const double pts[7][4] = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0},
                            {0, 1, 0, 1}, {0, 0, 1, 1}, {1, 1, 1, 1}};
  std::vector<Vec> out;
  for (const auto& p : pts) out.push_back(Eigen::Map<const Vec>(p, 4));
  return out;
}

}  // namespace terracini
