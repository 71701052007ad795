#include "terracini/cones.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "terracini/errors.hpp"
#include "terracini/hyperbolic.hpp"
#include "terracini/random.hpp"

namespace terracini {

const char* to_string(ConeKind k) {
  switch (k) {
    case ConeKind::polyhedral: return "polyhedral";
    case ConeKind::psd: return "psd";
    case ConeKind::linear_image: return "linear_image";
    case ConeKind::hyperbolicity: return "hyperbolicity";
    case ConeKind::veronese: return "veronese";
  }
  return "unknown";
}

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool lp_ok(const SolveReport& r) { return r.status == SolveStatus::optimal; }

// Polyhedral cone seen through a linear image of a polyhedral base.
ConeModel as_polyhedral(const ConeModel& c) {
  if (c.kind == ConeKind::polyhedral) return c;
  if (c.kind == ConeKind::linear_image && c.base->kind == ConeKind::polyhedral)
    return ConeModel::polyhedral(c.map * c.base->generators);
  fail(ErrorKind::unsupported,
       std::string("operation needs a polyhedral cone, got ") + to_string(c.kind));
}

// Union of the supports of all representations x = G mu, mu >= 0. Variables
// [mu (g) | t | s (g) | w (g) | r], all nonnegative:
//   G mu - t x = 0,  mu_j + s_j - w_j = 1,  t + r = T,  minimize sum s.
// The cap T keeps the feasible set bounded.
std::vector<int> polyhedral_face(const Mat& g0, const Vec& x0) {
  const int m = static_cast<int>(g0.rows()), k = static_cast<int>(g0.cols());
  if (x0.norm() == 0.0) return {};
  Mat g = g0;
  for (int j = 0; j < k; ++j) g.col(j).normalize();
  const Vec x = x0.normalized();
  LpProblem lp;
  const int nv = 3 * k + 2;
  lp.c = Vec::Zero(nv);
  lp.c.segment(k + 1, k).setOnes();
  lp.a = Mat::Zero(m + k + 1, nv);
  lp.a.block(0, 0, m, k) = g;
  lp.a.block(0, k, m, 1) = -x;
  for (int j = 0; j < k; ++j) {
    lp.a(m + j, j) = 1.0;
    lp.a(m + j, k + 1 + j) = 1.0;
    lp.a(m + j, 2 * k + 1 + j) = -1.0;
  }
  lp.a(m + k, k) = 1.0;
  lp.a(m + k, nv - 1) = 1.0;
  lp.b = Vec::Zero(m + k + 1);
  lp.b.segment(m, k).setOnes();
  lp.b(m + k) = 1e3 * k;
  lp.free.assign(nv, false);
  SolveReport r = solve_lp(lp);
  if (!lp_ok(r))
    fail(ErrorKind::numerical,
         std::string("minimal face LP: ") + to_string(r.status));
  std::vector<int> out;
  for (int j = 0; j < k; ++j)
    if (r.x(k + 1 + j) < 0.5) out.push_back(j);
  return out;
}

bool polyhedral_member(const Mat& g, const Vec& x, double tol) {
  const int m = static_cast<int>(g.rows()), k = static_cast<int>(g.cols());
  const double scale = std::max(1.0, x.norm());
  // G lambda + r - r' = x, minimize sum(r + r').
  LpProblem lp;
  lp.c = Vec::Zero(k + 2 * m);
  lp.c.tail(2 * m).setOnes();
  lp.a = Mat::Zero(m, k + 2 * m);
  lp.a.leftCols(k) = g / scale;
  lp.a.block(0, k, m, m) = Mat::Identity(m, m);
  lp.a.block(0, k + m, m, m) = -Mat::Identity(m, m);
  lp.b = x / scale;
  lp.free.assign(k + 2 * m, false);
  SolveReport r = solve_lp(lp);
  if (!lp_ok(r))
    fail(ErrorKind::numerical, std::string("membership LP: ") + to_string(r.status));
  return r.primal_objective <= std::max(tol, 1e-7);
}

Mat psd_kernel(const Vec& x, int d) {
  Mat m = smat(x, d);
  return kernel_basis(m, 1e-8);
}

std::map<std::vector<int>, int> exponent_index(int n, int degree) {
  std::map<std::vector<int>, int> idx;
  auto ex = graded_lex_exponents(n, degree);
  for (int i = 0; i < static_cast<int>(ex.size()); ++i) idx[ex[i]] = i;
  return idx;
}

}  // namespace

int ConeModel::ambient_dim() const {
  switch (kind) {
    case ConeKind::polyhedral: return static_cast<int>(generators.rows());
    case ConeKind::psd: return sym_dim(side);
    case ConeKind::linear_image: return static_cast<int>(map.rows());
    case ConeKind::hyperbolicity: return poly.num_vars();
    case ConeKind::veronese: return static_cast<int>(binomial(n + two_d - 1, two_d));
  }
  return 0;
}

bool is_pointed(const Mat& g) {
  const int m = static_cast<int>(g.rows()), k = static_cast<int>(g.cols());
  if (k == 0) return true;
  // l free, s >= 0 with G^T l - s = 1.
  LpProblem lp;
  lp.c = Vec::Zero(m + k);
  lp.c.tail(k).setOnes();
  lp.a = Mat::Zero(k, m + k);
  lp.a.leftCols(m) = g.transpose();
  lp.a.rightCols(k) = -Mat::Identity(k, k);
  lp.b = Vec::Ones(k);
  lp.free.assign(m + k, false);
  for (int i = 0; i < m; ++i) lp.free[i] = true;
  SolveReport r = solve_lp(lp);
  if (r.status == SolveStatus::infeasible) return false;
  if (!lp_ok(r))
    fail(ErrorKind::numerical, std::string("pointedness LP: ") + to_string(r.status));
  return true;
}

ConeModel ConeModel::polyhedral(Mat generators) {
  require(generators.cols() > 0, "polyhedral cone needs generators");
  for (int j = 0; j < generators.cols(); ++j)
    if (generators.col(j).norm() == 0.0)
      fail(ErrorKind::domain, "polyhedral generators must be nonzero");
  if (!is_pointed(generators))
    fail(ErrorKind::domain, "polyhedral cone is not pointed");
  ConeModel c;
  c.kind = ConeKind::polyhedral;
  c.generators = std::move(generators);
  return c;
}

ConeModel ConeModel::orthant_cone(int d) {
  require(d >= 1, "orthant dimension must be positive");
  ConeModel c;
  c.kind = ConeKind::polyhedral;
  c.generators = Mat::Identity(d, d);
  c.orthant = true;
  return c;
}

ConeModel ConeModel::psd(int d) {
  require(d >= 1, "psd side must be positive");
  ConeModel c;
  c.kind = ConeKind::psd;
  c.side = d;
  return c;
}

ConeModel ConeModel::linear_image(const ConeModel& base, Mat map) {
  if (base.kind != ConeKind::polyhedral && base.kind != ConeKind::psd)
    fail(ErrorKind::unsupported, "linear images need a polyhedral or psd base");
  require(map.cols() == base.ambient_dim(), "map width must match the base cone");
  ConeModel c;
  c.kind = ConeKind::linear_image;
  c.base = std::make_shared<const ConeModel>(base);
  c.map = std::move(map);
  return c;
}

ConeModel ConeModel::hyperbolicity(SparsePoly p, Vec e, int num_checks) {
  require(p.is_homogeneous(), "hyperbolic polynomial must be homogeneous");
  require(e.size() == p.num_vars(), "direction has wrong dimension");
  if (!(p.eval(e) > 0.0)) fail(ErrorKind::domain, "p(e) must be positive");
  if (num_checks > 0 && !check_hyperbolic(p, e, num_checks, 0x4b9).hyperbolic)
    fail(ErrorKind::not_hyperbolic, "polynomial failed the hyperbolicity spot check");
  ConeModel c;
  c.kind = ConeKind::hyperbolicity;
  c.poly = std::move(p);
  c.e = std::move(e);
  return c;
}

ConeModel ConeModel::veronese(int n, int two_d) {
  require(n >= 1, "veronese needs at least one variable");
  if (two_d <= 0 || two_d % 2 != 0)
    fail(ErrorKind::domain, "veronese degree must be even and positive");
  ConeModel c;
  c.kind = ConeKind::veronese;
  c.n = n;
  c.two_d = two_d;
  return c;
}

ConeModel square_cone() {
  Mat g(3, 4);
  g << 1, 1, -1, -1,
       1, -1, -1, 1,
       1, 1, 1, 1;
  return ConeModel::polyhedral(g);
}

ConeModel random_polyhedral_cone(int ambient, int num_generators,
                                 std::uint64_t seed) {
  require(ambient >= 1 && num_generators >= ambient,
          "need at least as many generators as dimensions");
  Rng rng(seed);
  Mat g(ambient, num_generators);
  for (int j = 0; j < num_generators; ++j) {
    g(0, j) = 1.0;
    for (int i = 1; i < ambient; ++i) g(i, j) = rng.normal();
  }
  return ConeModel::polyhedral(g);
}

NegatedFace NormalCone::negated_face() const {
  NegatedFace nf;
  if (face.kind == FaceDescriptor::Kind::psd) {
    nf.kind = NegatedFace::Kind::psd;
    nf.dim = static_cast<int>(face.z.rows());
    nf.z = face.z;
    return nf;
  }
  require(orthant, "only orthant and psd normal cones map to a negated face");
  const int dim = static_cast<int>(equalities.cols());
  nf.kind = NegatedFace::Kind::orthant;
  nf.dim = dim;
  std::vector<bool> in(dim, false);
  for (int i : face.indices) in[i] = true;
  for (int i = 0; i < dim; ++i)
    if (!in[i]) nf.support.push_back(i);
  return nf;
}

Subspace NormalCone::span() const {
  if (face.kind == FaceDescriptor::Kind::psd) {
    NegatedFace nf = negated_face();
    return nf.span();
  }
  // The polyhedral normal cone is full-dimensional inside the annihilator
  // of its face.
  if (equalities.rows() == 0) return Subspace::whole(static_cast<int>(equalities.cols()));
  return null_space(equalities);
}

bool membership(const ConeModel& c, const Vec& x, double tol) {
  require(x.size() == c.ambient_dim(), "point has wrong dimension");
  switch (c.kind) {
    case ConeKind::polyhedral:
      if (c.orthant) return x.minCoeff() >= -tol * std::max(1.0, x.cwiseAbs().maxCoeff());
      return polyhedral_member(c.generators, x, tol);
    case ConeKind::psd: {
      Eigen::SelfAdjointEigenSolver<Mat> es(smat(x, c.side));
      const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      return es.eigenvalues()(0) >= -tol * top;
    }
    case ConeKind::hyperbolicity:
      return descartes_membership(c.poly, c.e, x, tol);
    case ConeKind::linear_image: {
      if (c.base->kind == ConeKind::polyhedral)
        return polyhedral_member(c.map * c.base->generators, x, tol);
      // Preimage feasibility: min tr X s.t. B svec(X) = x, X psd.
      const int d = c.base->side;
      SdpProblem sdp;
      sdp.c = SymVec::from_matrix(Mat::Identity(d, d));
      for (int i = 0; i < c.map.rows(); ++i)
        sdp.a.emplace_back(d, c.map.row(i).transpose());
      sdp.b = x;
      SolveReport r = solve_sdp(sdp);
      if (r.status == SolveStatus::infeasible) return false;
      if (!lp_ok(r))
        fail(ErrorKind::numerical, std::string("preimage SDP: ") + to_string(r.status));
      return true;
    }
    case ConeKind::veronese:
      fail(ErrorKind::unsupported,
           "membership in the moment cone is not decided; extreme rays are "
           "parameterized by veronese_phi instead");
  }
  return false;
}

FaceDescriptor minimal_face(const ConeModel& c, const Vec& x) {
  FaceDescriptor f;
  if (c.kind == ConeKind::psd) {
    require(x.size() == c.ambient_dim(), "point has wrong dimension");
    f.kind = FaceDescriptor::Kind::psd;
    f.z = psd_kernel(x, c.side);
    return f;
  }
  if (c.kind == ConeKind::linear_image && c.base->kind == ConeKind::psd)
    return minimal_face(*c.base, x);  // base point convention
  const ConeModel p = c.kind == ConeKind::linear_image && c.base->orthant
                          ? *c.base
                          : as_polyhedral(c);
  require(x.size() == p.ambient_dim(), "point has wrong dimension");
  f.kind = FaceDescriptor::Kind::polyhedral;
  if (p.orthant) {
    const double top = x.cwiseAbs().maxCoeff();
    for (int i = 0; i < x.size(); ++i)
      if (x(i) > 1e-9 * top) f.indices.push_back(i);
    return f;
  }
  f.indices = polyhedral_face(p.generators, x);
  return f;
}

NormalCone normal_cone(const ConeModel& c, const Vec& x) {
  NormalCone nc;
  if (c.kind == ConeKind::linear_image) {
    nc = normal_cone(*c.base, x);
    nc.map = c.map;
    return nc;
  }
  if (c.kind != ConeKind::polyhedral && c.kind != ConeKind::psd)
    fail(ErrorKind::unsupported,
         std::string("normal cone not available for ") + to_string(c.kind));
  if (!membership(c, x, 1e-7)) fail(ErrorKind::domain, "point is not in the cone");
  nc.face = minimal_face(c, x);
  nc.orthant = c.orthant;
  if (c.kind == ConeKind::polyhedral) {
    const Mat& g = c.generators;
    std::vector<bool> in(g.cols(), false);
    for (int j : nc.face.indices) in[j] = true;
    nc.equalities = Mat(nc.face.indices.size(), g.rows());
    nc.inequalities = Mat(g.cols() - nc.face.indices.size(), g.rows());
    int ei = 0, ii = 0;
    for (int j = 0; j < g.cols(); ++j) {
      if (in[j])
        nc.equalities.row(ei++) = g.col(j).transpose();
      else
        nc.inequalities.row(ii++) = g.col(j).transpose();
    }
  }
  return nc;
}

bool is_extreme_ray(const ConeModel& c, const Vec& x) {
  if (x.norm() == 0.0) return false;
  switch (c.kind) {
    case ConeKind::psd: {
      Eigen::SelfAdjointEigenSolver<Mat> es(smat(x, c.side));
      const Vec& ev = es.eigenvalues();
      const double top = ev.cwiseAbs().maxCoeff();
      int pos = 0;
      for (int i = 0; i < ev.size(); ++i) pos += ev(i) > 1e-8 * top;
      return pos == 1 && ev(0) >= -1e-8 * top;
    }
    case ConeKind::veronese: {
      Vec z;
      return veronese_preimage(c.n, c.two_d, x, &z);
    }
    case ConeKind::polyhedral:
    case ConeKind::linear_image: {
      if (c.kind == ConeKind::linear_image && c.base->kind == ConeKind::psd)
        fail(ErrorKind::unsupported,
             "extremality in a linear image of the psd cone is not decided");
      const ConeModel p = as_polyhedral(c);
      if (!membership(p, x, 1e-7)) return false;
      std::vector<int> face = polyhedral_face(p.generators, x);
      Mat cols(p.generators.rows(), face.size());
      for (std::size_t j = 0; j < face.size(); ++j) cols.col(j) = p.generators.col(face[j]);
      return numerical_rank(cols) == 1;
    }
    case ConeKind::hyperbolicity:
      fail(ErrorKind::unsupported,
           "extreme rays of general hyperbolicity cones are not certified; use "
           "a known family (rank-one matrices, basis vectors, moment points)");
  }
  return false;
}

int face_height(const ConeModel& c) {
  switch (c.kind) {
    case ConeKind::polyhedral: return numerical_rank(c.generators) + 1;
    case ConeKind::psd: return c.side + 1;
    case ConeKind::linear_image:
      if (c.base->kind == ConeKind::polyhedral)
        return numerical_rank(c.map * c.base->generators) + 1;
      return c.ambient_dim() + 1;
    default: return c.ambient_dim() + 1;
  }
}

bool in_minimal_face(const ConeModel& c, const Vec& x, const Vec& y) {
  if (c.kind == ConeKind::psd) {
    Mat z = psd_kernel(x, c.side);
    if (z.cols() == 0) return true;
    Mat ym = smat(y, c.side);
    const double scale = std::max(ym.norm(), 1e-300);
    return (ym * z).norm() <= 1e-7 * scale;
  }
  if (c.kind == ConeKind::polyhedral) {
    FaceDescriptor fx = minimal_face(c, x);
    FaceDescriptor fxy = minimal_face(c, x + y);
    return fxy.indices == fx.indices;
  }
  fail(ErrorKind::unsupported,
       std::string("minimal faces not available for ") + to_string(c.kind));
}

FaceChainReport chain_reduce(const ConeModel& c, const std::vector<Vec>& points) {
  if (c.kind != ConeKind::polyhedral && c.kind != ConeKind::psd)
    fail(ErrorKind::unsupported, "chain reduction needs a polyhedral or psd cone");
  FaceChainReport rep;
  rep.height = face_height(c);
  if (points.empty()) return rep;
  Vec sum = Vec::Zero(c.ambient_dim());
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    if (!rep.indices.empty() && in_minimal_face(c, sum, points[i])) continue;
    rep.indices.push_back(i);
    sum += points[i];
  }
  rep.chain_length = static_cast<int>(rep.indices.size());
  return rep;
}

std::vector<std::vector<int>> graded_lex_exponents(int n, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int a = left; a >= 0; --a) {
      cur[i] = a;
      rec(i + 1, left - a);
    }
  };
  if (n > 0) rec(0, degree);
  return out;
}

Vec veronese_phi(int n, int two_d, const Vec& z) {
  if (two_d < 0 || two_d % 2 != 0) fail(ErrorKind::domain, "degree must be even");
  require(z.size() == n, "point has wrong dimension");
  auto ex = graded_lex_exponents(n, two_d);
  Vec out(ex.size());
  for (std::size_t k = 0; k < ex.size(); ++k) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= std::pow(z(i), ex[k][i]);
    out(k) = v;
  }
  return out;
}

bool veronese_preimage(int n, int two_d, const Vec& x, Vec* z) {
  auto idx = exponent_index(n, two_d);
  require(x.size() == static_cast<int>(idx.size()), "point has wrong dimension");
  int i0 = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> ex(n, 0);
    ex[i] = two_d;
    const double v = x(idx[ex]);
    if (v > best) {
      best = v;
      i0 = i;
    }
  }
  if (i0 < 0) return false;
  const double a = std::pow(best, 1.0 / two_d);
  Vec zz(n);
  for (int j = 0; j < n; ++j) {
    std::vector<int> ex(n, 0);
    ex[i0] = two_d - 1;
    ex[j] += 1;
    zz(j) = j == i0 ? a : a * x(idx[ex]) / best;
  }
  *z = zz;
  return (veronese_phi(n, two_d, zz) - x).norm() <= 1e-8 * x.norm();
}

}  // namespace terracini
