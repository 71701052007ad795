#include "terracini/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <limits>
#include <numeric>

#include <unsupported/Eigen/Polynomials>

#include "terracini/errors.hpp"
#include "terracini/random.hpp"

namespace terracini {

double HyperbolicSpectrum::max_abs() const {
  double m = 0.0;
  for (double v : eigenvalues) m = std::max(m, std::abs(v));
  return m;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Coefficients b_j of u -> p(x + R u dir), with R chosen so the roots of
// interest have modulus of order one.
std::vector<double> restrict_scaled(const SparsePoly& p, const Vec& x,
                                    const Vec& dir, double* r_out) {
  require(x.size() == p.num_vars() && dir.size() == p.num_vars(),
          "restriction point or direction has wrong dimension");
  const int m = std::max(0, p.degree());
  const double dn = dir.cwiseAbs().maxCoeff();
  const double xn = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  if (!(dn > 0.0)) {
    std::vector<double> c(m + 1, 0.0);
    c[0] = p.eval(x);
    *r_out = 1.0;
    return c;
  }
  const double r = (xn > 0.0 ? xn : 1.0) / dn;
  const int nodes = 2 * (m + 1);
  Mat pts(x.size(), nodes);
  Mat v(nodes, m + 1);
  for (int k = 0; k < nodes; ++k) {
    const double u = std::cos(M_PI * (k + 0.5) / nodes);
    pts.col(k) = x + (r * u) * dir;
    double pw = 1.0;
    for (int j = 0; j <= m; ++j) {
      v(k, j) = pw;
      pw *= u;
    }
  }
  Vec f = p.eval_batch(pts);
  Vec b = v.colPivHouseholderQr().solve(f);
  const double fs = f.cwiseAbs().maxCoeff();
  const double res = (v * b - f).cwiseAbs().maxCoeff();
  if (res > 1e-9 * std::max(fs, b.cwiseAbs().maxCoeff()) && res > 1e-300)
    fail(ErrorKind::numerical, "univariate restriction refit residual " +
                                   sci(res) + " too large");
  *r_out = r;
  return std::vector<double>(b.data(), b.data() + b.size());
}

}  // namespace

std::vector<double> restrict_univariate(const SparsePoly& p, const Vec& x,
                                        const Vec& dir) {
  double r = 1.0;
  std::vector<double> b = restrict_scaled(p, x, dir, &r);
  double scale = 1.0;
  for (double& c : b) {
    c /= scale;
    scale *= r;
  }
  return b;
}

HyperbolicSpectrum hyperbolic_eigenvalues(const SparsePoly& p, const Vec& e,
                                          const Vec& x,
                                          const SpectrumOptions& opt) {
  require(e.size() == p.num_vars() && x.size() == p.num_vars(),
          "direction or point has wrong dimension");
  const double pe = p.eval(e);
  if (!(pe > 0.0)) fail(ErrorKind::domain, "p(e) must be positive");
  HyperbolicSpectrum out;
  const int m = std::max(0, p.degree());
  if (m == 0) return out;

  double r = 1.0;
  std::vector<double> b = restrict_scaled(p, -x, e, &r);
  const double lead = pe * std::pow(r, m);
  for (double& c : b) c /= lead;
  b[m] = 1.0;
  double bmax = 0.0;
  for (double c : b) bmax = std::max(bmax, std::abs(c));

  int zeros = 0;
  if (opt.zero_deflation > 0.0)
    while (zeros < m && std::abs(b[zeros]) <= opt.zero_deflation * bmax) ++zeros;

  std::vector<std::complex<double>> roots;
  const int deg = m - zeros;
  if (deg == 1) {
    roots.emplace_back(-b[zeros] / b[m] * r, 0.0);
  } else if (deg > 1) {
    Vec coeffs(deg + 1);
    for (int j = 0; j <= deg; ++j) coeffs(j) = b[zeros + j];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    for (int i = 0; i < solver.roots().size(); ++i)
      roots.push_back(solver.roots()(i) * r);
  }
  for (int i = 0; i < zeros; ++i) roots.emplace_back(0.0, 0.0);

  double lmax = 0.0;
  for (const auto& z : roots) lmax = std::max(lmax, std::abs(z));
  const double scale = 1.0 + lmax;
  const double tau_complex = 1e-6 * scale;
  out.tau_eig = 1e-7 * scale;

  // A k-fold zero root is only resolved to about eps^(1/k) from sampled
  // coefficients. The k smallest roots are snapped to zero when they fit in
  // that radius and their mean (which is well conditioned) vanishes.
  if (opt.zero_deflation > 0.0 && !roots.empty()) {
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
      return std::abs(a) < std::abs(b);
    });
    const double zscale = 1.0 + std::max(lmax, r);
    for (int k = static_cast<int>(roots.size()); k >= 1; --k) {
      std::complex<double> mean = 0.0;
      for (int i = 0; i < k; ++i) mean += roots[i];
      mean /= static_cast<double>(k);
      const double radius = 2.0 * std::pow(1e-12, 1.0 / k) * zscale;
      if (std::abs(roots[k - 1]) <= radius && std::abs(mean) <= out.tau_eig) {
        for (int i = 0; i < k; ++i) roots[i] = 0.0;
        break;
      }
    }
  }

  // Roots of a real-rooted polynomial near a multiple root scatter into the
  // complex plane by about eps^(1/k); such clusters are merged to their mean.
  const int n = static_cast<int>(roots.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double reach = 2.5 * std::max({std::abs(roots[i].imag()),
                                           std::abs(roots[j].imag()),
                                           tau_complex});
      const bool complex_pair = std::abs(roots[i].imag()) > tau_complex ||
                                std::abs(roots[j].imag()) > tau_complex;
      if (complex_pair && std::abs(roots[i] - roots[j]) <= reach)
        parent[find(i)] = find(j);
    }
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> members;
    for (int j = 0; j < n; ++j)
      if (find(j) == find(i)) members.push_back(j);
    const int k = static_cast<int>(members.size());
    std::complex<double> mean = 0.0;
    for (int j : members) mean += roots[j];
    mean /= static_cast<double>(k);
    double radius = 0.0;
    for (int j : members) radius = std::max(radius, std::abs(roots[j] - mean));
    if (k == 1) {
      const double im = std::abs(roots[i].imag());
      if (im > tau_complex)
        fail(ErrorKind::not_hyperbolic,
             "complex hyperbolic eigenvalue with imaginary part " +
                 sci(im));
      out.imag_residual = std::max(out.imag_residual, im);
      vals[i] = roots[i].real();
    } else {
      const double allowed =
          std::max(tau_complex, 3.0 * std::pow(1e-14, 1.0 / k) * scale);
      if (radius > allowed || std::abs(mean.imag()) > tau_complex)
        fail(ErrorKind::not_hyperbolic,
             "complex hyperbolic eigenvalues (cluster radius " +
                 sci(radius) + ")");
      out.imag_residual = std::max(out.imag_residual, radius);
      vals[i] = mean.real();
    }
  }
  // Newton polish of isolated roots against direct evaluations of p; the
  // fitted coefficients only supply the derivative.
  auto fval = [&](double t) { return p.eval(t * e - x) / lead; };
  auto fder = [&](double t) {
    const double u = t / r;
    double d = 0.0, pw = 1.0;
    for (int j = 1; j <= m; ++j) {
      d += j * b[j] * pw;
      pw *= u;
    }
    return d / r;
  };
  for (int i = 0; i < n; ++i) {
    if (vals[i] == 0.0) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i) gap = std::min(gap, std::abs(vals[j] - vals[i]));
    if (gap <= 1e-4 * scale) continue;
    double t = vals[i], ft = fval(t);
    for (int it = 0; it < 3 && ft != 0.0; ++it) {
      const double d = fder(t);
      if (!(std::abs(d) > 0.0)) break;
      const double next = t - ft / d, fn = fval(next);
      if (!(std::abs(fn) < std::abs(ft)) || std::abs(next - t) > 1e-3 * gap) break;
      t = next;
      ft = fn;
    }
    vals[i] = t;
  }
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  out.eigenvalues = vals;
  for (double v : vals) out.rank += std::abs(v) > out.tau_eig;
  out.mult = m - out.rank;
  return out;
}

HyperbolicityCheck check_hyperbolic(const SparsePoly& p, const Vec& e,
                                    int num_samples, std::uint64_t seed) {
  HyperbolicityCheck out;
  Rng rng(seed);
  for (int s = 0; s < num_samples; ++s) {
    Vec x = rng.normal_vector(p.num_vars());
    try {
      HyperbolicSpectrum sp = hyperbolic_eigenvalues(p, e, x);
      out.worst_residual = std::max(out.worst_residual, sp.imag_residual);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::not_hyperbolic) throw;
      out.hyperbolic = false;
    }
  }
  return out;
}

bool descartes_membership(const SparsePoly& p, const Vec& e, const Vec& x,
                          double tol) {
  double r = 1.0;
  std::vector<double> b = restrict_scaled(p, x, e, &r);
  double bmax = 0.0;
  for (double c : b) bmax = std::max(bmax, std::abs(c));
  for (double c : b)
    if (c < -tol * bmax) return false;
  return true;
}

bool eigenvalue_membership(const SparsePoly& p, const Vec& e, const Vec& x) {
  HyperbolicSpectrum sp = hyperbolic_eigenvalues(p, e, x);
  return sp.min() >= -sp.tau_eig;
}

Localization localize(const SparsePoly& p, const Vec& x) {
  require(x.size() == p.num_vars(), "localization point has wrong dimension");
  require(p.is_homogeneous(), "localization needs a homogeneous polynomial");
  const int d = p.degree();
  const double xn = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  if (!(xn > 0.0)) return {p, d};
  // Rescale x by a power of two so the shifted coefficients are comparable.
  const int ex = std::ilogb(xn);
  const Vec xs = std::ldexp(1.0, -ex) * x;
  SparsePoly q = p.shift(xs);
  const double thr = 1e-10 * q.max_abs_coef();
  TermMap part;
  int mult = -1;
  for (int k = 0; k <= d && mult < 0; ++k) {
    for (const auto& [e, c] : q.terms()) {
      int deg = 0;
      for (int a : e) deg += a;
      if (deg == k && std::abs(c.get_d()) > thr) part[e] = c;
    }
    if (!part.empty()) mult = k;
  }
  if (mult < 0) return {SparsePoly(p.num_vars()), d};
  // p(x + y) = 2^{ex d} p(xs + y 2^{-ex}): degree-m part scales by 2^{ex(d-m)}.
  mpq_class factor = 1;
  mpq_class two = (ex >= 0) ? mpq_class(2) : mpq_class(1, 2);
  for (int i = 0; i < std::abs(ex) * (d - mult); ++i) factor *= two;
  SparsePoly loc(p.num_vars(), std::move(part));
  return {loc.scaled(factor), mult};
}

namespace {

SparsePoly iterated_derivative(const SparsePoly& q, const Vec& e, int times) {
  SparsePoly r = q;
  for (int i = 0; i < times; ++i) r = r.directional_derivative(e);
  mpq_class f = 1;
  for (int i = 2; i <= times; ++i) f *= i;
  return r.scaled(1 / f);
}

}  // namespace

Subspace lineality_space(const SparsePoly& q, const Vec& e) {
  const int n = q.num_vars();
  require(e.size() == n, "direction has wrong dimension");
  require(q.is_homogeneous(), "lineality needs a homogeneous polynomial");
  const int m = q.degree();
  if (m <= 0) return Subspace::whole(n);
  const double a0 = q.eval(e);
  if (!(a0 > 0.0)) fail(ErrorKind::domain, "q(e) must be positive");
  Vec a1 = linear_form_vector(iterated_derivative(q, e, m - 1));
  Subspace k1 = null_space(Mat(a1.transpose()));
  if (m == 1) return k1;
  Mat a2 = quadratic_form_matrix(iterated_derivative(q, e, m - 2));
  Mat g = -2.0 / a0 * (k1.basis().transpose() * a2 * k1.basis());
  Subspace result(n);
  if (g.size() > 0) {
    Mat ker = kernel_basis(g, 1e-8);
    result = Subspace::span(Mat(k1.basis() * ker));
    if (g.norm() == 0.0) result = k1;
  }

  // Sampled guard: lineality elements have all-zero spectra, the rest of K1
  // does not. Complex spectra here mean the localized polynomial lost too
  // much accuracy, which is a numerical failure of this instance.
  auto spectrum = [&](const Vec& y) {
    try {
      return hyperbolic_eigenvalues(q, e, y);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::not_hyperbolic) throw;
      fail(ErrorKind::numerical,
           std::string("lineality post-check: ") + err.what());
    }
  };
  Rng rng(0x11ea11);
  for (int s = 0; s < 10 && result.dim() > 0; ++s) {
    Vec y = result.basis() * rng.sphere(result.dim());
    HyperbolicSpectrum sp = spectrum(y);
    if (sp.max_abs() > sp.tau_eig)
      fail(ErrorKind::numerical,
           "lineality post-check: element with nonzero eigenvalue " +
               sci(sp.max_abs()));
  }
  Subspace rest = subspace_intersection(k1, result.complement());
  for (int s = 0; s < 10 && rest.dim() > 0; ++s) {
    Vec y = rest.basis() * rng.sphere(rest.dim());
    HyperbolicSpectrum sp = spectrum(y);
    if (sp.max_abs() <= sp.tau_eig)
      fail(ErrorKind::numerical,
           "lineality post-check: complement element with zero spectrum");
  }
  return result;
}

SparsePoly derivative_relaxation(const SparsePoly& p, const Vec& e,
                                 const Vec& etilde) {
  HyperbolicSpectrum sp = hyperbolic_eigenvalues(p, e, etilde);
  if (sp.min() <= sp.tau_eig)
    fail(ErrorKind::domain,
         "derivative direction is not in the open hyperbolicity cone");
  SparsePoly q = p.directional_derivative(etilde);
  Rng rng(0xde41);
  for (int s = 0; s < 20 && q.degree() > 0; ++s) {
    Vec g = rng.normal_vector(p.num_vars());
    HyperbolicSpectrum sg = hyperbolic_eigenvalues(p, e, g);
    Vec x = g + (0.01 - sg.min()) * e;
    HyperbolicSpectrum sq = hyperbolic_eigenvalues(q, e, x);
    if (sq.min() < -sq.tau_eig)
      fail(ErrorKind::numerical,
           "containment spot check of the derivative relaxation failed");
  }
  return q;
}

bool verify_mult3(const SparsePoly& p, const Vec& e, const Vec& etilde,
                  const Vec& x) {
  SparsePoly q = derivative_relaxation(p, e, etilde);
  HyperbolicSpectrum sp = hyperbolic_eigenvalues(p, e, x);
  HyperbolicSpectrum sq = hyperbolic_eigenvalues(q, e, x);
  const bool in_p = sp.min() >= -sp.tau_eig;
  const bool in_q = sq.min() >= -sq.tau_eig;
  const bool pre_p = in_p && sp.mult >= 3;
  const bool pre_q = in_q && sq.mult >= 2;
  if (!pre_p && !pre_q)
    fail(ErrorKind::domain,
         "point needs multiplicity >= 3 in the cone or >= 2 in the relaxation");
  bool ok = true;
  if (pre_p) ok = ok && in_q && sq.mult == sp.mult - 1;
  if (pre_q) ok = ok && in_p && sp.mult == sq.mult + 1;
  return ok;
}

TangentDerivativeReport verify_tangent_derivative(const SparsePoly& p,
                                                  const Vec& e,
                                                  const Vec& etilde,
                                                  const Vec& x, int num_dirs,
                                                  std::uint64_t seed) {
  TangentDerivativeReport rep;
  Localization lp = localize(p, x);
  rep.mult = lp.mult;
  if (lp.mult == 0) fail(ErrorKind::domain, "point is interior (multiplicity 0)");
  SparsePoly pd = derivative_relaxation(p, e, etilde);
  SparsePoly a = lp.poly.degree() >= 1 ? lp.poly.directional_derivative(etilde)
                                       : SparsePoly(p.num_vars());
  Localization lq = localize(pd, x);
  const SparsePoly& b = lq.poly;

  // Compare up to a positive scalar.
  double ab = 0.0, bb = 0.0;
  TermMap all;
  for (const auto& [ex, c] : a.terms()) all[ex] = 0;
  for (const auto& [ex, c] : b.terms()) all[ex] = 0;
  for (const auto& [ex, c] : all) {
    const double ca = a.coefficient(ex).get_d(), cb = b.coefficient(ex).get_d();
    ab += ca * cb;
    bb += cb * cb;
  }
  const double ratio = bb > 0 ? ab / bb : 0.0;
  double gap = 0.0;
  for (const auto& [ex, c] : all)
    gap = std::max(gap, std::abs(a.coefficient(ex).get_d() -
                                 ratio * b.coefficient(ex).get_d()));
  const double amax = std::max(a.max_abs_coef(), 1e-300);
  rep.coefficient_gap = gap / amax;
  rep.symbolic_equal = ratio > 0 && rep.coefficient_gap <= 1e-8 &&
                       a.degree() == b.degree();

  Rng rng(seed);
  rep.directions = num_dirs;
  for (int s = 0; s < num_dirs; ++s) {
    Vec y = rng.normal_vector(p.num_vars());
    auto member = [&](const SparsePoly& q) {
      if (q.degree() <= 0) return true;
      return eigenvalue_membership(q, e, y);
    };
    rep.membership_agreements += member(a) == member(b);
  }
  if (lp.mult >= 3) {
    rep.lineality_checked = true;
    Subspace la = lineality_space(lp.poly, e);
    Subspace lb = lineality_space(b, e);
    rep.lineality_distance = grassmann_distance(la, lb);
    rep.lineality_equal = subspace_equal(la, lb).equal;
  }
  rep.passed = rep.symbolic_equal &&
               rep.membership_agreements == rep.directions &&
               rep.lineality_equal;
  return rep;
}

EigenCurveSample eigencurve_derivatives(const SparsePoly& p, const Vec& e,
                                        const Vec& x, const Vec& y, double h) {
  EigenCurveSample out;
  out.y = y;
  HyperbolicSpectrum s0 = hyperbolic_eigenvalues(p, e, x);
  if (s0.min() < -s0.tau_eig) fail(ErrorKind::domain, "point is not in the cone");
  const int m = s0.mult;
  if (h <= 0.0) h = 1e-5 * (1.0 + s0.max_abs());
  out.h = h;
  if (m == 0) return out;
  SpectrumOptions raw;
  raw.zero_deflation = 0.0;
  auto smallest = [&](const Vec& pt) {
    HyperbolicSpectrum s = hyperbolic_eigenvalues(p, e, pt, raw);
    std::vector<double> v = s.eigenvalues;
    std::sort(v.begin(), v.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double cluster = std::abs(v[m - 1]);
    if (m < static_cast<int>(v.size()) && std::abs(v[m]) < 10.0 * cluster)
      fail(ErrorKind::numerical,
           "zero eigenvalues are not separated at this step; shrink h");
    std::vector<double> head(v.begin(), v.begin() + m);
    std::sort(head.begin(), head.end());
    return head;
  };
  std::vector<double> plus = smallest(x + h * y);
  std::vector<double> minus = smallest(x - h * y);
  for (int j = 0; j < m; ++j)
    out.derivatives.push_back((plus[j] - minus[m - 1 - j]) / (2.0 * h));
  std::sort(out.derivatives.begin(), out.derivatives.end(), std::greater<double>());
  Localization loc = localize(p, x);
  out.loc_spectrum = hyperbolic_eigenvalues(loc.poly, e, y).eigenvalues;
  for (int j = 0; j < m && j < static_cast<int>(out.loc_spectrum.size()); ++j)
    out.max_discrepancy = std::max(
        out.max_discrepancy, std::abs(out.derivatives[j] - out.loc_spectrum[j]));
  return out;
}

Vec boundary_point(const SparsePoly& p, const Vec& e, const Vec& x) {
  HyperbolicSpectrum s = hyperbolic_eigenvalues(p, e, x);
  if (s.min() <= s.tau_eig)
    fail(ErrorKind::domain, "boundary search needs an interior starting point");
  // Eigenvalues of x - c e are those of x shifted by -c, so one shift lands
  // on the boundary; a few corrections absorb rounding.
  Vec b = x - s.min() * e;
  for (int it = 0; it < 100; ++it) {
    HyperbolicSpectrum sb = hyperbolic_eigenvalues(p, e, b);
    const double lm = sb.min();
    if (std::abs(lm) <= 1e-10 * (1.0 + sb.max_abs())) {
      if (lm < 0) b -= lm * e;
      return b;
    }
    b -= lm * e;
  }
  fail(ErrorKind::numerical, "boundary point search did not converge");
}

}  // namespace terracini
