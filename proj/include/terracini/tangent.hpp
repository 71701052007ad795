#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "terracini/cones.hpp"
#include "terracini/linalg.hpp"
#include "terracini/random.hpp"

namespace terracini {

enum class VerdictMode { primal, dual, dual_sos_certified, dual_inconclusive };
const char* to_string(VerdictMode m);

// Primal mode compares L(sum x_i) (lhs) against sum L(x_i) (rhs); dual mode
// compares span(intersection of normal cones) (lhs) against the intersection
// of their spans (rhs). The certificate is a unit vector in the larger side
// that is not in the smaller one.
struct TerraciniVerdict {
  bool passed = false;
  int dim_lhs = 0;
  int dim_rhs = 0;
  std::optional<Vec> certificate;
  double certificate_residual = 0.0;
  double distance = 0.0;
  VerdictMode mode = VerdictMode::primal;
};

// Points of linear images are base-cone points.
Subspace convex_tangent_space(const ConeModel& c, const Vec& x);

TerraciniVerdict is_k_terracini_primal(const ConeModel& c,
                                       const std::vector<Vec>& rays,
                                       bool check_extreme = true);

// Linear images of the orthant or psd cone (rays in base coordinates),
// polyhedral cones (treated as the image of an orthant under the generator
// matrix) and Veronese cones (rays are moment vectors phi(z)).
TerraciniVerdict is_k_terracini_dual(const ConeModel& c,
                                     const std::vector<Vec>& rays);

// Dual check for the moment cone at phi(z_i); n = 2 is exact, n >= 3 uses
// the sum-of-squares lower bound for the left side.
TerraciniVerdict veronese_dual_check(int n, int two_d,
                                     const std::vector<Vec>& points);

struct UpgradeReport {
  int k_max = 0;
  std::vector<int> trials;  // per k, index k-1
  std::vector<int> passes;
  bool all_pass = true;
  int join_pairs = 0;
  int join_matches = 0;
  int chain_samples = 0;
  int max_chain = 0;
  int height = 0;
  bool chain_bound_holds = true;
};
UpgradeReport terracini_upgrade_check(const ConeModel& c, int k_max, int samples,
                                      std::uint64_t seed);

// Random extreme-ray generator for polyhedral, psd, Veronese and
// polyhedral-image cones.
Vec sample_extreme_ray(const ConeModel& c, Rng& rng);

struct DerivTerraciniReport {
  int ell = 0;
  int k = 0;
  int trials = 0;
  int passes = 0;
  int base_rays_used = 0;
  int boundary_rays_used = 0;
  int certificate_failures = 0;
  std::vector<std::string> failures;  // short descriptions, first few only
  double pass_rate() const { return trials ? double(passes) / trials : 1.0; }
};

// Iterated derivative relaxation of p along dirs, then primal k-Terracini
// checks on collections mixing base-cone extreme rays (from base_ray) and
// multiplicity-one boundary points of the relaxed cone.
DerivTerraciniReport deriv_terracini_experiment(
    const SparsePoly& p, const Vec& e, const std::vector<Vec>& dirs, int k,
    int trials, std::uint64_t seed, const std::function<Vec(Rng&)>& base_ray);

}  // namespace terracini
