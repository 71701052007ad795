#include "terracini/recovery.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "terracini/cones.hpp"
#include "terracini/errors.hpp"
#include "terracini/random.hpp"

namespace terracini {

const char* to_string(RecoveryKind k) { return k == RecoveryKind::lp ? "lp" : "sdp"; }

std::vector<SymVec> gaussian_map_psd(int d, int n, std::uint64_t seed) {
  require(d >= 1 && n >= 1, "need d >= 1 and n >= 1");
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<SymVec> out;
  for (int i = 0; i < n; ++i) {
    Mat g = sd * rng.normal_matrix(d, d);
    out.push_back(SymVec::from_matrix(0.5 * (g + g.transpose())));
  }
  return out;
}

Mat gaussian_map_lp(int d, int n, std::uint64_t seed) {
  require(d >= 1 && n >= 0, "need d >= 1 and n >= 0");
  Rng rng(seed);
  return rng.normal_matrix(n, d) / std::sqrt(static_cast<double>(std::max(n, 1)));
}

Mat stack_svec(const std::vector<SymVec>& a) {
  require(!a.empty(), "empty map");
  Mat out(a.size(), a[0].coords.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].coords.size() == out.cols(), "constraint sizes differ");
    out.row(i) = a[i].coords.transpose();
  }
  return out;
}

namespace {

double rel_error(const Vec& x, const Vec& ref) {
  return (x - ref).norm() / std::max(1.0, ref.norm());
}

void finish_trial(RecoveryTrial& t, const SolveReport& plain, const SolveReport& pert,
                  const RecoveryOptions& opt) {
  t.status = plain.status != SolveStatus::optimal ? plain.status : pert.status;
  t.valid = plain.status == SolveStatus::optimal && pert.status == SolveStatus::optimal;
  if (!t.valid) return;
  t.error = rel_error(plain.x, t.planted);
  t.perturbed_error = rel_error(pert.x, t.planted);
  t.recovered = t.error <= opt.tolerance && t.perturbed_error <= opt.tolerance;
}

// Polishes an SDP solution by Gauss-Newton on a factor X = G G^T of its
// numerical rank, solving <A_l, G G^T> = b_l. Interior-point iterates reach
// rank-deficient optima only at sqrt(gap) rate when strict complementarity
// is weak. The polished point is kept only when it is feasible to 1e-10 and
// stays within 1e-4 of the solver's answer, so it can sharpen a recovered
// optimum but never move to a different one.
Vec polish_low_rank(const std::vector<SymVec>& a, const Vec& b, const Vec& x, int d) {
  Eigen::SelfAdjointEigenSolver<Mat> es(smat(x, d));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (top == 0.0) return x;
  std::vector<int> keep;
  for (int i = 0; i < d; ++i)
    if (es.eigenvalues()(i) > 1e-5 * top) keep.push_back(i);
  const int r = static_cast<int>(keep.size());
  if (r == d) return x;
  Mat g(d, r);
  for (int j = 0; j < r; ++j)
    g.col(j) = es.eigenvectors().col(keep[j]) * std::sqrt(es.eigenvalues()(keep[j]));
  std::vector<Mat> am;
  for (const SymVec& s : a) am.push_back(s.to_matrix());
  const int m = static_cast<int>(a.size());
  auto residual = [&](const Mat& gg) {
    Vec res(m);
    const Mat xx = gg * gg.transpose();
    for (int l = 0; l < m; ++l) res(l) = (am[l].cwiseProduct(xx)).sum() - b(l);
    return res;
  };
  Vec res = residual(g);
  for (int it = 0; it < 20 && res.norm() > 1e-13 * (1.0 + b.norm()); ++it) {
    Mat jac(m, d * r);
    for (int l = 0; l < m; ++l) {
      Mat row = 2.0 * am[l] * g;
      jac.row(l) = Eigen::Map<const Vec>(row.data(), d * r).transpose();
    }
    Vec step = jac.completeOrthogonalDecomposition().solve(-res);
    g += Eigen::Map<const Mat>(step.data(), d, r);
    res = residual(g);
  }
  if (res.norm() > 1e-10 * (1.0 + b.norm())) return x;
  Vec polished = svec(g * g.transpose());
  if ((polished - x).norm() > 1e-4 * (1.0 + x.norm())) return x;
  return polished;
}

}  // namespace

RecoveryTrial exact_recovery_trial_lp(const Mat& a, const Vec& x_star,
                                      const RecoveryOptions& opt) {
  require(a.cols() == x_star.size(), "map and planted point sizes differ");
  require(x_star.minCoeff() >= 0.0, "planted point must be nonnegative");
  const int d = static_cast<int>(x_star.size());
  RecoveryTrial t;
  t.kind = RecoveryKind::lp;
  t.planted = x_star;
  t.k = static_cast<int>((x_star.array() > 0).count());
  LpProblem lp{Vec::Ones(d), a, a * x_star, std::vector<bool>(d, false)};
  SolveReport plain = solve_lp(lp, opt.solver);
  Rng rng(opt.seed);
  for (int i = 0; i < d; ++i) lp.c(i) += opt.perturbation * rng.normal();
  SolveReport pert = solve_lp(lp, opt.solver);
  finish_trial(t, plain, pert, opt);
  return t;
}

RecoveryTrial exact_recovery_trial_sdp(const std::vector<SymVec>& a, const Vec& x_star,
                                       const RecoveryOptions& opt) {
  require(!a.empty(), "empty map");
  const int d = a[0].d;
  require(x_star.size() == sym_dim(d), "planted matrix size differs from the map");
  Eigen::SelfAdjointEigenSolver<Mat> es(smat(x_star, d));
  const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  require(es.eigenvalues().minCoeff() >= -1e-10 * top, "planted matrix must be psd");
  RecoveryTrial t;
  t.kind = RecoveryKind::sdp;
  t.planted = x_star;
  t.k = numerical_rank(smat(x_star, d), 1e-9);
  SdpProblem p;
  p.c = SymVec::from_matrix(Mat::Identity(d, d));
  p.a = a;
  p.b.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p.b(i) = a[i].coords.dot(x_star);
  SolveReport plain = solve_sdp(p, opt.solver);
  Rng rng(opt.seed);
  Mat g = rng.normal_matrix(d, d);
  p.c = SymVec::from_matrix(Mat::Identity(d, d) +
                            opt.perturbation * 0.5 * (g + g.transpose()));
  SolveReport pert = solve_sdp(p, opt.solver);
  for (SolveReport* r : {&plain, &pert})
    if (r->status == SolveStatus::optimal) r->x = polish_low_rank(a, p.b, r->x, d);
  finish_trial(t, plain, pert, opt);
  return t;
}

Mat augmented_map_lp(const Mat& a) {
  Mat b(a.rows() + 1, a.cols());
  b.row(0).setOnes();
  b.bottomRows(a.rows()) = a;
  return b;
}

Mat augmented_map_sdp(const std::vector<SymVec>& a) {
  require(!a.empty(), "empty map");
  const int d = a[0].d;
  Mat b(a.size() + 1, sym_dim(d));
  b.row(0) = svec(Mat::Identity(d, d)).transpose();
  b.bottomRows(a.size()) = stack_svec(a);
  return b;
}

bool unique_preimage_orthant(const Mat& b, const Vec& x_star) {
  require(b.cols() == x_star.size(), "map and planted point sizes differ");
  require(x_star.minCoeff() >= 0.0, "planted point must be nonnegative");
  const int d = static_cast<int>(x_star.size());
  const double top = std::max(1e-300, x_star.maxCoeff());
  std::vector<int> supp, off;
  for (int i = 0; i < d; ++i) (x_star(i) > 1e-9 * top ? supp : off).push_back(i);
  Mat cols(b.rows(), supp.size());
  for (std::size_t j = 0; j < supp.size(); ++j) cols.col(j) = b.col(supp[j]);
  if (numerical_rank(cols) < static_cast<int>(supp.size())) return false;
  if (off.empty()) return true;
  NegatedFace nf;
  nf.kind = NegatedFace::Kind::orthant;
  nf.dim = d;
  nf.support = off;
  return relative_interior_point(row_space(b), nf).feasible;
}

bool unique_preimage_psd(const Mat& b, const Vec& x_star) {
  const int d = sym_side(static_cast<int>(x_star.size()));
  require(b.cols() == x_star.size(), "map and planted matrix sizes differ");
  Mat x = smat(x_star, d);
  Mat u = range_basis(x, 1e-9);
  const int r = static_cast<int>(u.cols());
  // Injectivity on the face span {U M U^T}.
  Mat face(b.cols(), sym_dim(r));
  int col = 0;
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      Mat e = u.col(i) * u.col(j).transpose();
      face.col(col++) = svec(0.5 * (e + e.transpose()));
    }
  if (numerical_rank(b * face) < face.cols()) return false;
  if (r == d) return true;
  NegatedFace nf;
  nf.kind = NegatedFace::Kind::psd;
  nf.dim = d;
  nf.z = kernel_basis(x, 1e-9);
  return relative_interior_point(row_space(b), nf).feasible;
}

namespace {

// max t s.t. V in null(A), V - t I in the cone, <I, V> = 1, in the layout
// [t free | U = V - t I]. Always strictly feasible when null(A) has an
// element of nonzero trace, so no infeasibility detection is needed.
bool null_interior_margin(const Mat& rows_t, const Vec& id, const ConeDims& dims,
                          const SolverOptions& opt, const char* what) {
  const int m = static_cast<int>(rows_t.rows()), nv = static_cast<int>(id.size());
  const double dd = id.squaredNorm();  // <I, I> = d
  ConicProblem p;
  p.cone = dims;
  p.c = Vec::Zero(1 + nv);
  p.c(0) = -1.0;
  p.a = Mat::Zero(m + 1, 1 + nv);
  p.b = Vec::Zero(m + 1);
  p.a.topLeftCorner(m, 1) = rows_t * id;
  p.a.topRightCorner(m, nv) = rows_t;
  p.a(m, 0) = dd;
  p.a.bottomRightCorner(1, nv) = id.transpose();
  p.b(m) = 1.0;
  SolveReport r = solve_conic(p, opt);
  if (r.status == SolveStatus::infeasible) return false;
  if (r.status != SolveStatus::optimal)
    fail(ErrorKind::numerical, std::string(what) + ": " + to_string(r.status));
  return r.x(0) > 1e-8;
}

}  // namespace

bool null_interior_lp(const Mat& a, const SolverOptions& opt) {
  const int d = static_cast<int>(a.cols());
  if (a.rows() == 0 || a.norm() == 0.0) return true;
  Subspace rows = row_space(a);
  if (rows.dim() == d) return false;
  ConeDims dims;
  dims.free = 1;
  dims.nonneg = d;
  return null_interior_margin(rows.basis().transpose(), Vec::Ones(d), dims, opt,
                              "null-interior LP");
}

bool null_interior_sdp(const std::vector<SymVec>& a, const SolverOptions& opt) {
  require(!a.empty(), "empty map");
  const int d = a[0].d;
  Mat stacked = stack_svec(a);
  if (stacked.norm() == 0.0) return true;
  Subspace rows = row_space(stacked);
  if (rows.dim() == sym_dim(d)) return false;
  ConeDims dims;
  dims.free = 1;
  dims.psd = {d};
  return null_interior_margin(rows.basis().transpose(), svec(Mat::Identity(d, d)), dims,
                              opt, "null-interior SDP");
}

Vec planted_sparse(int d, int k, Rng& rng) {
  require(k >= 0 && k <= d, "sparsity out of range");
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  Vec x = Vec::Zero(d);
  for (int i = 0; i < k; ++i) x(idx[i]) = rng.exponential();
  return x;
}

Vec planted_low_rank(int d, int k, Rng& rng) {
  require(k >= 0 && k <= d, "rank out of range");
  Mat g = rng.normal_matrix(d, k);
  return svec(g * g.transpose());
}

namespace {

// Runs f(i) for i in [0, count) on up to `jobs` threads; results in order.
template <class T, class F>
std::vector<T> parallel_map(int count, int jobs, F f) {
  std::vector<T> out(count);
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::future<void>> fs;
  for (int w = 0; w < jobs; ++w)
    fs.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < count; i += jobs) out[i] = f(i);
    }));
  for (auto& fu : fs) fu.get();
  return out;
}

RecoveryOptions trial_options(std::uint64_t seed, double tolerance = 1e-6) {
  RecoveryOptions o;
  o.seed = seed;
  o.tolerance = tolerance;
  return o;
}

// Marks solver errors as invalid trials instead of aborting a study.
template <class F>
RecoveryTrial guarded(RecoveryKind kind, const Vec& planted, F f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numerical) throw;
    RecoveryTrial t;
    t.kind = kind;
    t.planted = planted;
    return t;
  }
}

}  // namespace

RecoveryReport recovery_experiment(const RecoveryConfig& cfg) {
  require(cfg.d >= 1 && cfg.n >= 1 && cfg.trials >= 0, "bad experiment size");
  RecoveryReport rep;
  rep.config = cfg;
  rep.trials = parallel_map<RecoveryTrial>(cfg.trials, cfg.jobs, [&](int t) {
    const std::uint64_t s = mix_seed(cfg.seed, static_cast<std::uint64_t>(t));
    Rng rng(mix_seed(s, 1));
    if (cfg.kind == RecoveryKind::lp) {
      Mat a = gaussian_map_lp(cfg.d, cfg.n, mix_seed(s, 0));
      Vec x = planted_sparse(cfg.d, cfg.k, rng);
      return guarded(cfg.kind, x, [&] { return exact_recovery_trial_lp(a, x, trial_options(s, cfg.tolerance)); });
    }
    std::vector<SymVec> a = gaussian_map_psd(cfg.d, cfg.n, mix_seed(s, 0));
    Vec x = planted_low_rank(cfg.d, cfg.k, rng);
    return guarded(cfg.kind, x, [&] { return exact_recovery_trial_sdp(a, x, trial_options(s, cfg.tolerance)); });
  });
  for (const RecoveryTrial& t : rep.trials) {
    rep.valid += t.valid;
    rep.recovered += t.valid && t.recovered;
  }
  return rep;
}

double StudyReport::agreement_rate(bool gated) const {
  const auto& m = gated ? agreement_gated : agreement;
  const int total = m[0][0] + m[0][1] + m[1][0] + m[1][1];
  return total ? double(m[0][0] + m[1][1]) / total : 0.0;
}

namespace {

struct MapOutcome {
  MapRecord record;
  std::vector<RecoveryTrial> trials;
};

void aggregate(StudyReport& rep, std::vector<MapOutcome>&& outs) {
  for (MapOutcome& o : outs) {
    const MapRecord& m = o.record;
    const bool gated = m.surjective && m.null_interior;
    rep.gated_out += !gated;
    rep.face_checks += m.face_checks;
    rep.face_passes += m.face_passes;
    for (RecoveryTrial& t : o.trials) {
      if (t.valid && t.unique_preimage) {
        ++rep.agreement[t.recovered][*t.unique_preimage];
        if (gated) ++rep.agreement_gated[t.recovered][*t.unique_preimage];
      }
      if (t.face_check || t.face_error) {
        ++rep.joint_total;
        rep.joint_success += t.valid && t.recovered && t.face_check && t.face_check->passed;
      }
      rep.trials.push_back(std::move(t));
      rep.trial_map.push_back(m.index);
    }
    rep.maps.push_back(m);
  }
}

// The image cone of a non-surjective B is linearly isomorphic to its image
// under an orthonormal basis of row(B), which is surjective.
Mat surjective_form(const Mat& b) {
  Subspace rows = row_space(b);
  if (rows.dim() == b.rows()) return b;
  return rows.basis().transpose();
}

// Face check that records numerical failures on the trial instead of
// aborting the study; they count as failed checks.
void face_check(RecoveryTrial& t, MapRecord& m, const ConeModel& img,
                const std::vector<Vec>& rays) {
  ++m.face_checks;
  try {
    t.face_check = is_k_terracini_dual(img, rays);
    m.face_passes += t.face_check->passed;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numerical) throw;
    t.face_error = true;
  }
}

std::vector<int> support_of(const Vec& x) {
  std::vector<int> s;
  for (int i = 0; i < x.size(); ++i)
    if (x(i) > 0) s.push_back(i);
  return s;
}

}  // namespace

StudyReport dt_equivalence_study(int d, int n, int k, int maps, int plants,
                                 std::uint64_t seed, int jobs) {
  require(k >= 1 && k < d, "need 1 <= k < d");
  require(n >= 1 && maps >= 0 && plants >= 0, "bad study size");
  StudyReport rep;
  rep.config = {RecoveryKind::lp, d, n, k, maps * plants, seed, jobs};
  rep.plants_per_map = plants;
  auto outs = parallel_map<MapOutcome>(maps, jobs, [&](int mi) {
    MapOutcome o;
    o.record.index = mi;
    const std::uint64_t ms = mix_seed(seed, static_cast<std::uint64_t>(mi));
    Mat a = gaussian_map_lp(d, n, mix_seed(ms, 0));
    Mat b = augmented_map_lp(a);
    o.record.surjective = numerical_rank(b) == b.rows();
    o.record.null_interior = null_interior_lp(a);
    const ConeModel img = ConeModel::linear_image(ConeModel::orthant_cone(d), surjective_form(b));
    for (int pi = 0; pi < plants; ++pi) {
      const std::uint64_t ps = mix_seed(ms, 1 + static_cast<std::uint64_t>(pi));
      Rng rng(ps);
      Vec x = planted_sparse(d, k, rng);
      RecoveryTrial t = guarded(RecoveryKind::lp, x, [&] {
        return exact_recovery_trial_lp(a, x, trial_options(ps));
      });
      o.record.plants_valid += t.valid;
      o.record.plants_recovered += t.valid && t.recovered;
      t.unique_preimage = unique_preimage_orthant(b, x);
      std::vector<Vec> rays;
      for (int i : support_of(x)) rays.push_back(Vec::Unit(d, i));
      face_check(t, o.record, img, rays);
      o.trials.push_back(std::move(t));
    }
    return o;
  });
  aggregate(rep, std::move(outs));
  return rep;
}

StudyReport sdp_equivalence_study(int d, int n, int k, int maps, int plants,
                                  std::uint64_t seed, int jobs) {
  require(k >= 1 && k <= d, "need 1 <= k <= d");
  require(n >= 1 && maps >= 0 && plants >= 0, "bad study size");
  StudyReport rep;
  rep.config = {RecoveryKind::sdp, d, n, k, maps * plants, seed, jobs};
  rep.plants_per_map = plants;
  auto outs = parallel_map<MapOutcome>(maps, jobs, [&](int mi) {
    MapOutcome o;
    o.record.index = mi;
    const std::uint64_t ms = mix_seed(seed, static_cast<std::uint64_t>(mi));
    std::vector<SymVec> a = gaussian_map_psd(d, n, mix_seed(ms, 0));
    Mat b = augmented_map_sdp(a);
    o.record.surjective = numerical_rank(b) == b.rows();
    o.record.null_interior = null_interior_sdp(a);
    const ConeModel img = ConeModel::linear_image(ConeModel::psd(d), surjective_form(b));
    for (int pi = 0; pi < plants; ++pi) {
      const std::uint64_t ps = mix_seed(ms, 1 + static_cast<std::uint64_t>(pi));
      Rng rng(ps);
      Vec x = planted_low_rank(d, k, rng);
      RecoveryTrial t = guarded(RecoveryKind::sdp, x, [&] {
        return exact_recovery_trial_sdp(a, x, trial_options(ps));
      });
      o.record.plants_valid += t.valid;
      o.record.plants_recovered += t.valid && t.recovered;
      t.unique_preimage = unique_preimage_psd(b, x);
      // Rays: the rank-one terms of the eigendecomposition of X*.
      Eigen::SelfAdjointEigenSolver<Mat> es(smat(x, d));
      std::vector<Vec> rays;
      for (int j = d - k; j < d; ++j)
        rays.push_back(svec(es.eigenvalues()(j) * es.eigenvectors().col(j) *
                            es.eigenvectors().col(j).transpose()));
      face_check(t, o.record, img, rays);
      o.trials.push_back(std::move(t));
    }
    return o;
  });
  aggregate(rep, std::move(outs));
  return rep;
}

StudyReport most_tc_study(int d, int n, int k, int maps, int plants,
                          std::uint64_t seed, int jobs) {
  require(k >= 1 && k <= d, "need 1 <= k <= d");
  require(n >= 1 && maps >= 0 && plants >= 0, "bad study size");
  StudyReport rep;
  rep.config = {RecoveryKind::sdp, d, n, k, maps * plants, seed, jobs};
  rep.plants_per_map = plants;
  rep.dimension_flag = n <= sym_dim(d) - sym_dim(d - k);
  auto outs = parallel_map<MapOutcome>(maps, jobs, [&](int mi) {
    MapOutcome o;
    o.record.index = mi;
    const std::uint64_t ms = mix_seed(seed, static_cast<std::uint64_t>(mi));
    std::vector<SymVec> a = gaussian_map_psd(d, n, mix_seed(ms, 0));
    Mat b = augmented_map_sdp(a);
    o.record.surjective = numerical_rank(b) == b.rows();
    o.record.null_interior = null_interior_sdp(a);
    const ConeModel img = ConeModel::linear_image(ConeModel::psd(d), surjective_form(b));
    // Evidence for an open set of good maps: a nearby map, same plants.
    Rng noise(mix_seed(ms, 0xfeed));
    const ConeModel perturbed = ConeModel::linear_image(
        ConeModel::psd(d), surjective_form(b + 1e-3 * noise.normal_matrix(b.rows(), b.cols())));
    for (int pi = 0; pi < plants; ++pi) {
      const std::uint64_t ps = mix_seed(ms, 1 + static_cast<std::uint64_t>(pi));
      Rng rng(ps);
      const int rank = rng.uniform_int(1, k);
      Mat g = rng.normal_matrix(d, rank);
      Vec x = svec(g * g.transpose());
      RecoveryTrial t = guarded(RecoveryKind::sdp, x, [&] {
        return exact_recovery_trial_sdp(a, x, trial_options(ps));
      });
      o.record.plants_valid += t.valid;
      o.record.plants_recovered += t.valid && t.recovered;
      t.unique_preimage = unique_preimage_psd(b, x);
      std::vector<Vec> rays;
      for (int j = 0; j < rank; ++j) rays.push_back(svec(g.col(j) * g.col(j).transpose()));
      face_check(t, o.record, img, rays);
      RecoveryTrial scratch;
      MapRecord near;
      face_check(scratch, near, perturbed, rays);
      ++o.record.perturbed_face_checks;
      o.record.perturbed_face_passes += near.face_passes;
      o.trials.push_back(std::move(t));
    }
    return o;
  });
  aggregate(rep, std::move(outs));
  return rep;
}

}  // namespace terracini
