#include "terracini/neighborly.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <set>

#include "terracini/errors.hpp"
#include "terracini/random.hpp"
#include "terracini/solver.hpp"

namespace terracini {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Next k-subset of {0..n-1} in lexicographic order; false when exhausted.
// Margins at or below this (unit generators, unit box) are solver noise.
constexpr double kSeparationTol = 1e-6;

bool next_subset(std::vector<int>& s, int n) {
  const int k = static_cast<int>(s.size());
  int i = k - 1;
  while (i >= 0 && s[i] == n - k + i) --i;
  if (i < 0) return false;
  ++s[i];
  for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  return true;
}

}  // namespace

std::optional<Vec> exposing_functional(const Mat& g, const std::vector<int>& subset) {
  const int m = static_cast<int>(g.rows()), n = static_cast<int>(g.cols());
  std::vector<bool> in(n, false);
  for (int i : subset) in[i] = true;
  const int rest = n - static_cast<int>(subset.size());
  if (rest == 0) return Vec::Zero(m);
  // max t over l in the unit box: l^T x_i = 0 (i in I), l^T x_j >= t (j not
  // in I). Bounded with a strictly feasible point, so the IPM stays stable
  // even when the subset is only barely a face or not one at all.
  // Layout [l free | t free | s >= 0 | u >= 0 | v >= 0].
  const int nv = m + 1 + rest + 2 * m;
  LpProblem lp;
  lp.c = Vec::Zero(nv);
  lp.c(m) = -1.0;
  lp.a = Mat::Zero(n + 2 * m, nv);
  lp.b = Vec::Zero(n + 2 * m);
  int slack = 0;
  for (int i = 0; i < n; ++i) {
    lp.a.row(i).head(m) = g.col(i).transpose();
    if (!in[i]) {
      lp.a(i, m) = -1.0;
      lp.a(i, m + 1 + slack++) = -1.0;
    }
  }
  const int u0 = m + 1 + rest, v0 = u0 + m;
  for (int i = 0; i < m; ++i) {
    lp.a(n + i, i) = 1.0;
    lp.a(n + i, u0 + i) = 1.0;
    lp.b(n + i) = 1.0;
    lp.a(n + m + i, i) = -1.0;
    lp.a(n + m + i, v0 + i) = 1.0;
    lp.b(n + m + i) = 1.0;
  }
  lp.free.assign(nv, false);
  for (int i = 0; i <= m; ++i) lp.free[i] = true;
  SolveReport r = solve_lp(lp);
  if (r.status != SolveStatus::optimal)
    fail(ErrorKind::numerical, std::string("exposure LP: ") + to_string(r.status));

  // Polish: vanish exactly on the subset, then rescale to clear 1 off it.
  Vec l = r.x.head(m);
  if (!subset.empty()) {
    Mat xi(m, subset.size());
    for (std::size_t j = 0; j < subset.size(); ++j) xi.col(j) = g.col(subset[j]);
    Subspace s = Subspace::span(xi);
    l -= s.project(l);
  }
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    if (!in[j]) lo = std::min(lo, g.col(j).dot(l));
  if (!(lo > kSeparationTol)) return std::nullopt;  // not strictly separating
  l /= lo;
  return l;
}

NeighborlinessVerdict is_k_neighborly_polyhedral(const ConeModel& c, int k,
                                                 const NeighborlyOptions& opt) {
  if (c.kind != ConeKind::polyhedral)
    fail(ErrorKind::unsupported, "neighborliness LPs need a polyhedral cone");
  require(k >= 1, "k must be positive");
  // Work on the distinguished set: extreme generators, unit-normalized.
  std::vector<int> ext;
  for (int j = 0; j < c.generators.cols(); ++j)
    if (is_extreme_ray(c, c.generators.col(j))) ext.push_back(j);
  Mat g(c.generators.rows(), ext.size());
  for (std::size_t j = 0; j < ext.size(); ++j)
    g.col(j) = c.generators.col(ext[j]).normalized();
  const int n = static_cast<int>(g.cols());
  auto original = [&](const std::vector<int>& s) {
    std::vector<int> out;
    for (int i : s) out.push_back(ext[i]);
    return out;
  };
  const int kk = std::min(k, n);

  NeighborlinessVerdict v;
  v.k = k;
  v.extreme_indices = ext;
  long long total = 0;
  for (int s = 1; s <= kk; ++s) total += binomial(n, s);

  std::vector<std::vector<int>> subsets;
  if (total <= opt.max_subsets) {
    for (int s = 1; s <= kk; ++s) {
      std::vector<int> cur(s);
      for (int i = 0; i < s; ++i) cur[i] = i;
      do subsets.push_back(cur);
      while (next_subset(cur, n));
    }
  } else {
    if (!opt.allow_sampling)
      fail(ErrorKind::usage, "subset count " + std::to_string(total) +
                                 " exceeds the cap; enable sampling");
    v.sampled = true;
    Rng rng(opt.seed);
    std::set<std::vector<int>> seen;
    while (static_cast<long long>(seen.size()) < opt.max_subsets) {
      const int s = rng.uniform_int(1, kk);
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng.engine());
      std::vector<int> cur(perm.begin(), perm.begin() + s);
      std::sort(cur.begin(), cur.end());
      seen.insert(cur);
    }
    subsets.assign(seen.begin(), seen.end());
    std::stable_sort(subsets.begin(), subsets.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
  }

  // Evaluate in chunks (in parallel when asked), then scan in order so the
  // reported failure is the first one regardless of scheduling.
  const int jobs = std::max(1, opt.jobs);
  const std::size_t chunk = std::max<std::size_t>(64, jobs * 8);
  for (std::size_t start = 0; start < subsets.size(); start += chunk) {
    const std::size_t end = std::min(subsets.size(), start + chunk);
    std::vector<std::optional<Vec>> res(end - start);
    if (jobs == 1) {
      for (std::size_t i = start; i < end; ++i)
        res[i - start] = exposing_functional(g, subsets[i]);
    } else {
      std::vector<std::future<void>> fs;
      for (int w = 0; w < jobs; ++w)
        fs.push_back(std::async(std::launch::async, [&, w] {
          for (std::size_t i = start + w; i < end; i += jobs)
            res[i - start] = exposing_functional(g, subsets[i]);
        }));
      for (auto& f : fs) f.get();
    }
    for (std::size_t i = start; i < end; ++i) {
      ++v.subsets_checked;
      if (!res[i - start]) {
        v.failing_subset = original(subsets[i]);
        v.passed = false;
        return v;
      }
      v.witnesses[original(subsets[i])] = *res[i - start];
    }
  }
  v.passed = true;
  return v;
}

ConeModel cyclic_polytope_cone(const std::vector<double>& t, int dim) {
  Mat g(dim, t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    double p = 1.0;
    for (int i = 0; i < dim; ++i, p *= t[j]) g(i, j) = p;
  }
  return ConeModel::polyhedral(g);
}

}  // namespace terracini
