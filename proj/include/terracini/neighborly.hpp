#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "terracini/cones.hpp"

namespace terracini {

struct NeighborlinessVerdict {
  int k = 0;
  bool passed = false;
  bool sampled = false;  // subsets were sampled instead of enumerated
  long long subsets_checked = 0;
  std::vector<int> extreme_indices;  // generators that are extreme rays
  std::optional<std::vector<int>> failing_subset;
  // Separating functional per passing subset: l(x_i) = 0 on the subset,
  // l(x_j) >= 1 on the other extreme generators, both after unit normalization.
  std::map<std::vector<int>, Vec> witnesses;
};

struct NeighborlyOptions {
  long long max_subsets = 1000000;
  bool allow_sampling = false;  // sample max_subsets subsets above the cap
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Subsets index the cone's generators; non-extreme generators are skipped.
// Exact-exposure LP for every subset of at most k generators, in
// lexicographic order by size; stops at the first failing subset.
NeighborlinessVerdict is_k_neighborly_polyhedral(const ConeModel& c, int k,
                                                 const NeighborlyOptions& opt = {});

// Witness for a single subset, if one exists.
std::optional<Vec> exposing_functional(const Mat& unit_generators,
                                       const std::vector<int>& subset);

// Cone over the cyclic polytope: generators (1, t, t^2, ..., t^(dim-1)).
ConeModel cyclic_polytope_cone(const std::vector<double>& t, int dim);

}  // namespace terracini
