#include "terracini/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "terracini/errors.hpp"

namespace terracini {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

int ConeDims::size() const {
  int n = free + nonneg;
  for (int d : psd) n += sym_dim(d);
  return n;
}

int ConeDims::degree() const {
  int n = nonneg;
  for (int d : psd) n += d;
  return n;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nesterov-Todd scaling of one PSD block: W = G G^T with W S W = X and
// G^{-1} X G^{-T} = G^T S G = diag(v).
struct PsdScaling {
  int d = 0;
  int offset = 0;
  Mat g, ginv;
  Mat w;
  Vec v;
};

struct Scaling {
  Vec lin_g, lin_v;
  std::vector<PsdScaling> psd;
};

// Operations on the cone part of the variable vector (nonneg + psd blocks).
class ConeOps {
 public:
  explicit ConeOps(const ConeDims& dims) : dims_(dims) {
    int off = dims.nonneg;
    for (int d : dims.psd) {
      offsets_.push_back(off);
      off += sym_dim(d);
    }
    size_ = off;
  }

  int size() const { return size_; }

  Vec identity() const {
    Vec e = Vec::Zero(size_);
    e.head(dims_.nonneg).setOnes();
    for (std::size_t k = 0; k < dims_.psd.size(); ++k)
      e.segment(offsets_[k], sym_dim(dims_.psd[k])) =
          svec(Mat::Identity(dims_.psd[k], dims_.psd[k]));
    return e;
  }

  bool scaling(const Vec& x, const Vec& s, Scaling* sc) const {
    const int nl = dims_.nonneg;
    sc->lin_g = (x.head(nl).array() / s.head(nl).array()).sqrt();
    sc->lin_v = (x.head(nl).array() * s.head(nl).array()).sqrt();
    sc->psd.clear();
    for (std::size_t k = 0; k < dims_.psd.size(); ++k) {
      const int d = dims_.psd[k];
      PsdScaling b;
      b.d = d;
      b.offset = offsets_[k];
      Mat xm = smat(x.segment(b.offset, sym_dim(d)), d);
      Mat sm = smat(s.segment(b.offset, sym_dim(d)), d);
      Eigen::LLT<Mat> lx(xm), ls(sm);
      if (lx.info() != Eigen::Success || ls.info() != Eigen::Success)
        return false;
      Mat lxm = lx.matrixL();
      Mat lsm = ls.matrixL();
      Eigen::JacobiSVD<Mat> svd(lsm.transpose() * lxm,
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
      b.v = svd.singularValues();
      if (b.v.minCoeff() <= 0.0) return false;
      Vec isq = b.v.array().rsqrt();
      Vec sq = b.v.array().sqrt();
      b.g = lxm * svd.matrixV() * isq.asDiagonal();
      Mat lxinv = lxm.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
      b.ginv = sq.asDiagonal() * svd.matrixV().transpose() * lxinv;
      b.w = b.g * b.g.transpose();
      sc->psd.push_back(std::move(b));
    }
    return true;
  }

  // H^{-1} z = W z W.
  Vec apply_hinv(const Scaling& sc, const Vec& z) const {
    Vec out(size_);
    const int nl = dims_.nonneg;
    out.head(nl) = sc.lin_g.array().square() * z.head(nl).array();
    for (const auto& b : sc.psd) {
      Mat zm = smat(z.segment(b.offset, sym_dim(b.d)), b.d);
      out.segment(b.offset, sym_dim(b.d)) = svec(b.w * zm * b.w);
    }
    return out;
  }

  // Solves v o u = rhs_scaled blockwise and maps back: r_c = G^{-T} u G^{-1}.
  // rhs_fn supplies the scaled right-hand side for each block.
  Vec centering_rhs(const Scaling& sc, double sigma_mu, const Vec* dx,
                    const Vec* ds) const {
    Vec out(size_);
    const int nl = dims_.nonneg;
    for (int i = 0; i < nl; ++i) {
      const double v = sc.lin_v(i);
      double r = sigma_mu - v * v;
      if (dx) r -= (*dx)(i) * (*ds)(i);
      out(i) = r / (v * sc.lin_g(i));
    }
    for (const auto& b : sc.psd) {
      const int d = b.d;
      Mat r = -Mat(b.v.array().square().matrix().asDiagonal());
      r.diagonal().array() += sigma_mu;
      if (dx) {
        Mat dxs = b.ginv * smat(dx->segment(b.offset, sym_dim(d)), d) *
                  b.ginv.transpose();
        Mat dss = b.g.transpose() * smat(ds->segment(b.offset, sym_dim(d)), d) *
                  b.g;
        r -= 0.5 * (dxs * dss + dss * dxs);
      }
      Mat u(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) u(i, j) = 2.0 * r(i, j) / (b.v(i) + b.v(j));
      out.segment(b.offset, sym_dim(d)) =
          svec(b.ginv.transpose() * u * b.ginv);
    }
    return out;
  }

  // Largest alpha with x + alpha dx and s + alpha ds in the cone.
  double max_step(const Scaling& sc, const Vec& x, const Vec& dx, const Vec& s,
                  const Vec& ds) const {
    double a = kInf;
    const int nl = dims_.nonneg;
    for (int i = 0; i < nl; ++i) {
      if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
      if (ds(i) < 0) a = std::min(a, -s(i) / ds(i));
    }
    for (const auto& b : sc.psd) {
      const int d = b.d;
      Vec isq = b.v.array().rsqrt();
      Mat px = isq.asDiagonal() * b.ginv;
      Mat ps = b.g * isq.asDiagonal();
      Mat mx = px * smat(dx.segment(b.offset, sym_dim(d)), d) * px.transpose();
      Mat ms = ps.transpose() * smat(ds.segment(b.offset, sym_dim(d)), d) * ps;
      double lx = Eigen::SelfAdjointEigenSolver<Mat>(mx, Eigen::EigenvaluesOnly)
                      .eigenvalues()(0);
      double ls = Eigen::SelfAdjointEigenSolver<Mat>(ms, Eigen::EigenvaluesOnly)
                      .eigenvalues()(0);
      if (lx < 0) a = std::min(a, -1.0 / lx);
      if (ls < 0) a = std::min(a, -1.0 / ls);
    }
    return a;
  }

 private:
  ConeDims dims_;
  std::vector<int> offsets_;
  int size_ = 0;
};

struct Presolved {
  std::vector<int> rows;      // kept rows of the original A
  std::vector<double> row_scale;
  std::vector<int> free_cols; // kept free columns (indices within free block)
  bool infeasible = false;
  bool unbounded = false;
};

// Keeps a maximal independent row set, checks consistency of the dropped
// rows, then drops dependent free columns.
Presolved presolve(const ConicProblem& p) {
  Presolved out;
  const int m = static_cast<int>(p.a.rows());
  const int nf = p.cone.free;
  if (m > 0) {
    Eigen::ColPivHouseholderQR<Mat> qr(p.a.transpose());
    qr.setThreshold(1e-10);
    const int r = static_cast<int>(qr.rank());
    std::vector<int> kept, dropped;
    for (int i = 0; i < m; ++i) {
      int idx = qr.colsPermutation().indices()(i);
      (i < r ? kept : dropped).push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    if (!dropped.empty()) {
      Mat ai(static_cast<int>(kept.size()), p.a.cols());
      Vec bi(static_cast<int>(kept.size()));
      for (std::size_t k = 0; k < kept.size(); ++k) {
        ai.row(static_cast<int>(k)) = p.a.row(kept[k]);
        bi(static_cast<int>(k)) = p.b(kept[k]);
      }
      Eigen::ColPivHouseholderQR<Mat> qi(ai.transpose());
      for (int k : dropped) {
        Vec w = qi.solve(Vec(p.a.row(k).transpose()));
        double pred = w.dot(bi);
        if (std::abs(pred - p.b(k)) >
            1e-9 * (1.0 + std::abs(p.b(k)) + w.cwiseAbs().dot(bi.cwiseAbs()))) {
          out.infeasible = true;
        }
      }
    }
    out.rows = kept;
  }
  for (int i : out.rows) {
    double nr = p.a.row(i).norm();
    out.row_scale.push_back(nr > 0 ? 1.0 / nr : 1.0);
  }
  if (nf > 0) {
    Mat af(static_cast<int>(out.rows.size()), nf);
    for (std::size_t k = 0; k < out.rows.size(); ++k)
      af.row(static_cast<int>(k)) = p.a.row(out.rows[k]).head(nf);
    if (af.rows() == 0) {
      // Free variables without constraints: bounded only if their cost is 0.
      for (int j = 0; j < nf; ++j)
        if (std::abs(p.c(j)) > 1e-12) out.unbounded = true;
      return out;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(af);
    qr.setThreshold(1e-10);
    const int r = static_cast<int>(qr.rank());
    std::vector<int> kept, dropped;
    for (int i = 0; i < nf; ++i) {
      int idx = qr.colsPermutation().indices()(i);
      (i < r ? kept : dropped).push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    if (!dropped.empty()) {
      Mat ak(af.rows(), static_cast<int>(kept.size()));
      Vec ck(static_cast<int>(kept.size()));
      for (std::size_t k = 0; k < kept.size(); ++k) {
        ak.col(static_cast<int>(k)) = af.col(kept[k]);
        ck(static_cast<int>(k)) = p.c(kept[k]);
      }
      Eigen::ColPivHouseholderQR<Mat> qk(ak);
      for (int j : dropped) {
        Vec w = qk.solve(Vec(af.col(j)));
        if (std::abs(w.dot(ck) - p.c(j)) >
            1e-9 * (1.0 + std::abs(p.c(j)) + w.cwiseAbs().dot(ck.cwiseAbs())))
          out.unbounded = true;
      }
    }
    out.free_cols = kept;
  }
  return out;
}

class HsdSolver {
 public:
  HsdSolver(const ConicProblem& p, const SolverOptions& opt)
      : p_(p), opt_(opt) {}

  SolveReport run();

 private:
  const ConicProblem& p_;
  SolverOptions opt_;
};

SolveReport HsdSolver::run() {
  const ConicProblem& p = p_;
  require(p.a.cols() == p.cone.size(), "constraint matrix width " +
                                           std::to_string(p.a.cols()) +
                                           " does not match cone size " +
                                           std::to_string(p.cone.size()));
  require(p.a.rows() == p.b.size(), "constraint rows and b length differ");
  require(p.c.size() == p.cone.size(), "objective length mismatch");

  SolveReport rep;
  const int n = p.cone.size();
  rep.x = Vec::Zero(n);
  rep.s = Vec::Zero(n);
  rep.y = Vec::Zero(p.a.rows());

  Presolved pre = presolve(p);
  if (pre.infeasible) {
    rep.status = SolveStatus::infeasible;
    rep.detail = "inconsistent equality constraints";
    return rep;
  }

  const int nf_all = p.cone.free;
  const int m = static_cast<int>(pre.rows.size());
  const int nf = static_cast<int>(pre.free_cols.size());
  ConeDims cd = p.cone;
  cd.free = 0;
  ConeOps ops(cd);
  const int nc = ops.size();

  Mat af(m, nf), ac(m, nc);
  Vec b(m), cf(nf), cc(nc);
  for (int k = 0; k < m; ++k) {
    const int i = pre.rows[k];
    const double sc = pre.row_scale[k];
    for (int j = 0; j < nf; ++j) af(k, j) = sc * p.a(i, pre.free_cols[j]);
    ac.row(k) = sc * p.a.row(i).tail(nc);
    b(k) = sc * p.b(i);
  }
  for (int j = 0; j < nf; ++j) cf(j) = p.c(pre.free_cols[j]);
  cc = p.c.tail(nc);

  if (pre.unbounded) {
    rep.status = SolveStatus::unbounded;
    rep.detail = "free variables with inconsistent costs";
    return rep;
  }

  const double nu = cd.degree();
  const double bnorm = b.norm();
  const double cnorm = std::sqrt(cf.squaredNorm() + cc.squaredNorm());

  Vec xc = ops.identity(), sc = ops.identity();
  Vec xf = Vec::Zero(nf), y = Vec::Zero(m);
  double tau = 1.0, kappa = 1.0;

  auto finish = [&](SolveStatus st, int it) {
    rep.status = st;
    rep.iterations = it;
    const double t = (st == SolveStatus::optimal) ? tau : 1.0;
    Vec xfull = Vec::Zero(n), sfull = Vec::Zero(n);
    for (int j = 0; j < nf; ++j) xfull(pre.free_cols[j]) = xf(j) / t;
    xfull.tail(nc) = xc / t;
    sfull.tail(nc) = sc / t;
    Vec yfull = Vec::Zero(p.a.rows());
    for (int k = 0; k < m; ++k) yfull(pre.rows[k]) = pre.row_scale[k] * y(k) / t;
    rep.x = xfull;
    rep.s = sfull;
    rep.y = yfull;
    rep.primal_objective = p.c.dot(xfull);
    rep.dual_objective = p.b.dot(yfull);
    (void)nf_all;
    return rep;
  };

  double prev_alpha = 1.0;
  int small_steps = 0;
  for (int it = 0; it <= opt_.max_iterations; ++it) {
    Vec r1 = ac * xc + af * xf - b * tau;
    Vec r2c = ac.transpose() * y + sc - cc * tau;
    Vec r2f = af.transpose() * y - cf * tau;
    const double pobj = cc.dot(xc) + cf.dot(xf);
    const double dobj = b.dot(y);
    const double r3 = dobj - pobj - kappa;
    const double mu = (xc.dot(sc) + tau * kappa) / (nu + 1.0);

    rep.residuals.primal = r1.norm() / tau / (1.0 + bnorm);
    rep.residuals.dual =
        std::sqrt(r2c.squaredNorm() + r2f.squaredNorm()) / tau / (1.0 + cnorm);
    rep.residuals.gap = std::abs(pobj - dobj) / tau /
                        (1.0 + std::abs(pobj / tau) + std::abs(dobj / tau));
    if (rep.residuals.primal <= opt_.tol && rep.residuals.dual <= opt_.tol &&
        rep.residuals.gap <= opt_.tol)
      return finish(SolveStatus::optimal, it);

    // Infeasibility certificates from the embedding.
    if (dobj > 0) {
      Vec ry = ac.transpose() * y + sc;
      double res = std::sqrt(ry.squaredNorm() +
                             (af.transpose() * y).squaredNorm());
      if (res <= opt_.tol * dobj * std::max(1.0, cnorm) && tau < kappa) {
        rep.detail = "dual ray certifies primal infeasibility";
        finish(SolveStatus::infeasible, it);
        return rep;
      }
    }
    if (pobj < 0) {
      double res = (ac * xc + af * xf).norm();
      if (res <= opt_.tol * (-pobj) * std::max(1.0, bnorm) && tau < kappa) {
        rep.detail = "primal ray certifies dual infeasibility";
        finish(SolveStatus::unbounded, it);
        return rep;
      }
    }
    if (it == opt_.max_iterations) break;

    Scaling scal;
    if (!ops.scaling(xc, sc, &scal)) {
      rep.detail = "lost positive definiteness";
      break;
    }

    // Normal-equation block and saddle-point system with free columns.
    Mat ah(m, nc);
    for (int k = 0; k < m; ++k)
      ah.row(k) = ops.apply_hinv(scal, ac.row(k).transpose()).transpose();
    const int ks = m + nf;
    Mat kmat = Mat::Zero(ks, ks);
    kmat.topLeftCorner(m, m) = ah * ac.transpose();
    kmat.topRightCorner(m, nf) = af;
    kmat.bottomLeftCorner(nf, m) = af.transpose();
    const double reg = 1e-14 * std::max(1.0, kmat.diagonal().cwiseAbs().maxCoeff());
    kmat.topLeftCorner(m, m).diagonal().array() += reg;
    kmat.bottomRightCorner(nf, nf).diagonal().array() -= reg;
    Eigen::PartialPivLU<Mat> lu;
    if (ks > 0) lu.compute(kmat);
    auto ksolve = [&](const Vec& r) -> Vec {
      if (ks == 0) return Vec::Zero(0);
      Vec z = lu.solve(r);
      Vec res = r - kmat * z;
      z += lu.solve(res);
      return z;
    };

    Vec hc = ops.apply_hinv(scal, cc);
    Vec achc = ac * hc;
    Vec prhs(ks);
    prhs << achc + b, cf;
    Vec pz = ksolve(prhs);
    Vec py = pz.head(m), pf = pz.tail(nf);
    const double den = b.dot(py) - achc.dot(py) + cc.dot(hc) - cf.dot(pf) +
                       kappa / tau;

    struct Dir {
      Vec dxc, dxf, dy, dsc;
      double dtau = 0, dkappa = 0;
    };
    auto solve_dir = [&](const Vec& rc, double rtau, double eta) {
      Dir d;
      Vec t = ops.apply_hinv(scal, rc + eta * r2c);
      Vec qrhs(ks);
      qrhs << -eta * r1 - ac * t, -eta * r2f;
      Vec qz = ksolve(qrhs);
      Vec qy = qz.head(m), qf = qz.tail(nf);
      const double num = -eta * r3 - b.dot(qy) + achc.dot(qy) + cc.dot(t) +
                         cf.dot(qf) + rtau / tau;
      d.dtau = num / den;
      d.dy = qy + d.dtau * py;
      d.dxf = qf + d.dtau * pf;
      d.dxc = ops.apply_hinv(scal, ac.transpose() * d.dy) - hc * d.dtau + t;
      // ds = r_c - H dx, with H dx recovered from the dual equation.
      d.dsc = -eta * r2c - ac.transpose() * d.dy + cc * d.dtau;
      d.dkappa = (rtau - kappa * d.dtau) / tau;
      return d;
    };
    auto step_len = [&](const Dir& d) {
      double a = ops.max_step(scal, xc, d.dxc, sc, d.dsc);
      if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    // Predictor.
    Vec rc_aff = -sc;
    Dir aff = solve_dir(rc_aff, -tau * kappa, 1.0);
    double a_aff = std::min(1.0, step_len(aff));
    const double mu_aff =
        ((xc + a_aff * aff.dxc).dot(sc + a_aff * aff.dsc) +
         (tau + a_aff * aff.dtau) * (kappa + a_aff * aff.dkappa)) /
        (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    Vec rc = ops.centering_rhs(scal, sigma * mu, &aff.dxc, &aff.dsc);
    const double rtau = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    Dir dir = solve_dir(rc, rtau, 1.0 - sigma);
    double alpha = std::min(1.0, opt_.step_fraction * step_len(dir));

    xc += alpha * dir.dxc;
    sc += alpha * dir.dsc;
    xf += alpha * dir.dxf;
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;

    if (!(tau > 0) || !(kappa > 0) || !std::isfinite(xc.sum()) ||
        !std::isfinite(y.sum())) {
      rep.detail = "iterates left the cone";
      finish(SolveStatus::numerical_failure, it + 1);
      return rep;
    }
    small_steps = (alpha < 1e-8 && prev_alpha < 1e-8) ? small_steps + 1 : 0;
    prev_alpha = alpha;
    if (small_steps > 5) {
      rep.detail = "step length stalled";
      break;
    }
    rep.iterations = it + 1;
  }
  if (rep.detail.empty()) rep.detail = "iteration cap reached";
  finish(SolveStatus::numerical_failure, rep.iterations);
  return rep;
}

}  // namespace

SolveReport solve_conic(const ConicProblem& p, const SolverOptions& opt) {
  HsdSolver s(p, opt);
  return s.run();
}

SolveReport solve_lp(const LpProblem& p, const SolverOptions& opt) {
  const int n = static_cast<int>(p.c.size());
  require(p.a.cols() == n, "LP constraint width does not match objective");
  std::vector<bool> fr = p.free;
  if (fr.empty()) fr.assign(n, false);
  require(static_cast<int>(fr.size()) == n, "free mask length mismatch");
  std::vector<int> order;
  for (int j = 0; j < n; ++j)
    if (fr[j]) order.push_back(j);
  const int nf = static_cast<int>(order.size());
  for (int j = 0; j < n; ++j)
    if (!fr[j]) order.push_back(j);

  ConicProblem cp;
  cp.cone.free = nf;
  cp.cone.nonneg = n - nf;
  cp.c.resize(n);
  cp.a.resize(p.a.rows(), n);
  cp.b = p.b;
  for (int k = 0; k < n; ++k) {
    cp.c(k) = p.c(order[k]);
    cp.a.col(k) = p.a.col(order[k]);
  }
  SolveReport r = solve_conic(cp, opt);
  Vec x(n), s(n);
  for (int k = 0; k < n; ++k) {
    x(order[k]) = r.x(k);
    s(order[k]) = r.s(k);
  }
  r.x = x;
  r.s = s;
  return r;
}

SolveReport solve_sdp(const SdpProblem& p, const SolverOptions& opt) {
  const int d = p.c.d;
  ConicProblem cp;
  cp.cone.psd = {d};
  cp.c = p.c.coords;
  cp.a.resize(static_cast<int>(p.a.size()), sym_dim(d));
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    require(p.a[i].d == d, "SDP constraint side mismatch");
    cp.a.row(static_cast<int>(i)) = p.a[i].coords.transpose();
  }
  cp.b = p.b;
  require(cp.b.size() == cp.a.rows(), "SDP right-hand side length mismatch");
  return solve_conic(cp, opt);
}

int NegatedFace::ambient() const {
  return kind == Kind::orthant ? dim : sym_dim(dim);
}

Subspace NegatedFace::span() const {
  if (kind == Kind::orthant) {
    Mat m = Mat::Zero(dim, static_cast<int>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k)
      m(support[k], static_cast<int>(k)) = 1.0;
    return Subspace::from_orthonormal(m);
  }
  const int r = static_cast<int>(z.cols());
  std::vector<Vec> gens;
  for (int a = 0; a < r; ++a)
    for (int c = a; c < r; ++c) {
      Mat e = z.col(a) * z.col(c).transpose();
      gens.push_back(svec(0.5 * (e + e.transpose())));
    }
  return Subspace::span(gens, sym_dim(dim));
}

namespace {

RelIntResult relint_orthant(const Subspace& w, const NegatedFace& nf,
                            double delta, const SolverOptions& opt) {
  RelIntResult out;
  const int n = nf.dim;
  const int k = w.dim();
  const Mat& bw = w.basis();
  std::vector<bool> in_support(n, false);
  for (int j : nf.support) in_support[j] = true;
  const int ns = static_cast<int>(nf.support.size());
  if (ns == 0) {
    out.feasible = true;
    out.point = Vec::Zero(n);
    out.slack = kInf;
    return out;
  }
  // Variables: mu (k, free), t (free), s_j >= 0 (ns), r >= 0.
  const int nvar = k + 1 + ns + 1;
  const int nzero = n - ns;
  const int mrows = nzero + ns + 1;
  LpProblem lp;
  lp.c = Vec::Zero(nvar);
  lp.c(k) = -1.0;
  lp.a = Mat::Zero(mrows, nvar);
  lp.b = Vec::Zero(mrows);
  lp.free.assign(nvar, false);
  for (int j = 0; j <= k; ++j) lp.free[j] = true;
  int row = 0;
  for (int i = 0; i < n; ++i)
    if (!in_support[i]) {
      lp.a.row(row).head(k) = bw.row(i);
      ++row;
    }
  for (int q = 0; q < ns; ++q) {
    const int j = nf.support[q];
    lp.a.row(row).head(k) = -bw.row(j);
    lp.a(row, k) = -1.0;
    lp.a(row, k + 1 + q) = -1.0;
    ++row;
  }
  for (int q = 0; q < ns; ++q) lp.a.row(row).head(k) -= bw.row(nf.support[q]);
  lp.a(row, nvar - 1) = 1.0;
  lp.b(row) = ns;
  SolveReport r = solve_lp(lp, opt);
  if (r.status != SolveStatus::optimal)
    fail(ErrorKind::numerical, std::string("relative interior LP: ") +
                                   to_string(r.status) + " (" + r.detail + ")");
  out.slack = r.x(k);
  out.point = bw * r.x.head(k);
  out.feasible = out.slack > delta;
  return out;
}

RelIntResult relint_psd(const Subspace& w, const NegatedFace& nf, double delta,
                        const SolverOptions& opt) {
  RelIntResult out;
  const int d = nf.dim;
  const int r = static_cast<int>(nf.z.cols());
  if (r == 0) {
    out.feasible = true;
    out.point = Vec::Zero(sym_dim(d));
    out.slack = kInf;
    return out;
  }
  Subspace v = subspace_intersection(w, nf.span());
  const int k = v.dim();
  if (k == 0) {
    out.reducing_certificate = Mat::Identity(r, r) / r;
    out.slack = -kInf;
    return out;
  }
  std::vector<Mat> mi(k);
  Vec tr(k);
  for (int i = 0; i < k; ++i) {
    mi[i] = -nf.z.transpose() * smat(Vec(v.basis().col(i)), d) * nf.z;
    tr(i) = mi[i].trace();
  }
  double mscale = 0;
  for (const auto& m : mi) mscale = std::max(mscale, m.norm());
  if (tr.norm() <= 1e-12 * std::max(1.0, mscale)) {
    // Every element of W in the face span has trace zero: only 0 is PSD.
    out.reducing_certificate = Mat::Identity(r, r) / r;
    out.slack = -kInf;
    return out;
  }
  Vec mu0 = tr * (r / tr.squaredNorm());
  Mat nt = null_space(Mat(tr.transpose())).basis();  // k x (k-1)
  auto mmap = [&](const Vec& mu) {
    Mat m = Mat::Zero(r, r);
    for (int i = 0; i < k; ++i) m += mu(i) * mi[i];
    return m;
  };
  SdpProblem sdp;
  sdp.c = SymVec::from_matrix(mmap(mu0));
  for (int j = 0; j < nt.cols(); ++j)
    sdp.a.push_back(SymVec::from_matrix(mmap(nt.col(j))));
  sdp.a.push_back(SymVec::from_matrix(Mat::Identity(r, r)));
  sdp.b = Vec::Zero(static_cast<int>(sdp.a.size()));
  sdp.b(sdp.b.size() - 1) = 1.0;
  SolveReport rep = solve_sdp(sdp, opt);
  if (rep.status != SolveStatus::optimal)
    fail(ErrorKind::numerical, std::string("relative interior SDP: ") +
                                   to_string(rep.status) + " (" + rep.detail +
                                   ")");
  const int nc = static_cast<int>(nt.cols());
  out.slack = rep.y(nc);
  Vec mu = mu0 - nt * rep.y.head(nc);
  out.point = v.basis() * mu;
  out.feasible = out.slack > delta;
  if (!out.feasible) out.reducing_certificate = smat(rep.x, r);
  return out;
}

}  // namespace

RelIntResult relative_interior_point(const Subspace& w, const NegatedFace& n,
                                     double delta, const SolverOptions& opt) {
  require(w.ambient_dim() == n.ambient(),
          "subspace and face live in different ambient spaces");
  if (n.kind == NegatedFace::Kind::orthant) return relint_orthant(w, n, delta, opt);
  return relint_psd(w, n, delta, opt);
}

namespace {

Subspace span_orthant(const Subspace& w, const NegatedFace& nf,
                      const SolverOptions& opt) {
  const int n = nf.dim;
  const int k = w.dim();
  const Mat& bw = w.basis();
  const int ns = static_cast<int>(nf.support.size());
  if (ns == 0 || k == 0) return Subspace(n);
  std::vector<bool> in_support(n, false);
  for (int j : nf.support) in_support[j] = true;
  // Variables: mu (k free), u (ns), a (ns), s (ns), t; maximize sum u with
  // u <= 1 and u_j <= -w_j. The cap -sum w_j <= 100 ns keeps the optimal set
  // bounded; without it the dual has no interior and the IPM drifts. Points
  // of W ∩ N whose support entries differ by more than about 100 ns in ratio
  // can be missed.
  const int nvar = k + 3 * ns + 1;
  const int nzero = n - ns;
  LpProblem lp;
  lp.c = Vec::Zero(nvar);
  lp.c.segment(k, ns).setConstant(-1.0);
  lp.a = Mat::Zero(nzero + 2 * ns + 1, nvar);
  lp.b = Vec::Zero(nzero + 2 * ns + 1);
  lp.free.assign(nvar, false);
  for (int j = 0; j < k; ++j) lp.free[j] = true;
  int row = 0;
  for (int i = 0; i < n; ++i)
    if (!in_support[i]) lp.a.row(row++).head(k) = bw.row(i);
  for (int q = 0; q < ns; ++q) {
    lp.a(row, k + q) = 1.0;
    lp.a(row, k + ns + q) = 1.0;
    lp.b(row) = 1.0;
    ++row;
    lp.a.row(row).head(k) = -bw.row(nf.support[q]);
    lp.a(row, k + q) = -1.0;
    lp.a(row, k + 2 * ns + q) = -1.0;
    ++row;
  }
  for (int q = 0; q < ns; ++q) lp.a.row(row).head(k) -= bw.row(nf.support[q]);
  lp.a(row, nvar - 1) = 1.0;
  lp.b(row) = 100.0 * ns;
  SolveReport r = solve_lp(lp, opt);
  if (r.status != SolveStatus::optimal)
    fail(ErrorKind::numerical, std::string("face span LP: ") +
                                   to_string(r.status) + " (" + r.detail + ")");
  std::vector<int> strict;
  for (int q = 0; q < ns; ++q)
    if (r.x(k + q) > 0.5) strict.push_back(nf.support[q]);
  NegatedFace sub = nf;
  sub.support = strict;
  return subspace_intersection(w, sub.span());
}

}  // namespace

Subspace span_of_intersection(const Subspace& w, const NegatedFace& n,
                              double delta, const SolverOptions& opt) {
  require(w.ambient_dim() == n.ambient(),
          "subspace and face live in different ambient spaces");
  if (n.kind == NegatedFace::Kind::orthant) return span_orthant(w, n, opt);
  NegatedFace cur = n;
  for (int round = 0; round <= n.dim; ++round) {
    if (cur.z.cols() == 0) return Subspace(n.ambient());
    RelIntResult r = relint_psd(w, cur, delta, opt);
    if (r.feasible) return subspace_intersection(w, cur.span());
    if (r.slack < -delta || !r.reducing_certificate)
      return Subspace(n.ambient());
    const Mat& y = *r.reducing_certificate;
    Eigen::SelfAdjointEigenSolver<Mat> es(y);
    const double ymax = es.eigenvalues().maxCoeff();
    std::vector<int> ker;
    for (int i = 0; i < y.rows(); ++i)
      if (es.eigenvalues()(i) <= 1e-5 * ymax) ker.push_back(i);
    if (ker.empty()) return Subspace(n.ambient());
    if (static_cast<int>(ker.size()) == y.rows())
      fail(ErrorKind::numerical, "facial reduction certificate is zero");
    Mat u(y.rows(), static_cast<int>(ker.size()));
    for (std::size_t j = 0; j < ker.size(); ++j)
      u.col(static_cast<int>(j)) = es.eigenvectors().col(ker[j]);
    cur.z = cur.z * u;
  }
  fail(ErrorKind::numerical, "facial reduction did not terminate");
}

Subspace span_of_normal_preimage(const Mat& b, const NegatedFace& n,
                                 double delta) {
  require(b.cols() == n.ambient(), "map width does not match face ambient");
  require(numerical_rank(b) == b.rows(), "map B is not surjective");
  Subspace w = row_space(b);
  Subspace u = span_of_intersection(w, n, delta);
  if (u.dim() == 0) return Subspace(static_cast<int>(b.rows()));
  Eigen::LLT<Mat> bbt(b * b.transpose());
  Mat lam = bbt.solve(b * u.basis());
  return Subspace::span(lam);
}

}  // namespace terracini
