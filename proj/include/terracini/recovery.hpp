#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terracini/linalg.hpp"
#include "terracini/solver.hpp"
#include "terracini/tangent.hpp"

namespace terracini {

enum class RecoveryKind { lp, sdp };
const char* to_string(RecoveryKind k);

struct RecoveryTrial {
  RecoveryKind kind = RecoveryKind::lp;
  Vec planted;              // x* or svec(X*)
  int k = 0;                // sparsity or rank
  SolveStatus status = SolveStatus::numerical_failure;
  bool valid = false;       // both solves finished
  bool recovered = false;   // both solutions within 1e-6 * scale of planted
  double error = 0.0;       // relative error of the plain solve
  double perturbed_error = 0.0;
  std::optional<bool> unique_preimage;
  std::optional<TerraciniVerdict> face_check;
  bool face_error = false;  // the face check hit a numerical failure
};

struct RecoveryOptions {
  double tolerance = 1e-6;  // relative recovery tolerance
  double perturbation = 1e-6;
  std::uint64_t seed = 0;   // drives the objective perturbation
  SolverOptions solver;
};

// n matrices with N(0, 1/n) entries, symmetrized as (A + A^T) / 2.
std::vector<SymVec> gaussian_map_psd(int d, int n, std::uint64_t seed);
Mat gaussian_map_lp(int d, int n, std::uint64_t seed);
Mat stack_svec(const std::vector<SymVec>& a);

// min 1^T x s.t. Ax = Ax*, x >= 0, plus a re-solve with objective 1 + eps g.
RecoveryTrial exact_recovery_trial_lp(const Mat& a, const Vec& x_star,
                                      const RecoveryOptions& opt = {});
// min tr X s.t. <A_i, X> = <A_i, X*>, X psd, plus a perturbed re-solve.
RecoveryTrial exact_recovery_trial_sdp(const std::vector<SymVec>& a,
                                       const Vec& x_star,
                                       const RecoveryOptions& opt = {});

// Augmented maps: [1^T; A] for the orthant and [tr; <A_i, .>] for psd.
Mat augmented_map_lp(const Mat& a);
Mat augmented_map_sdp(const std::vector<SymVec>& a);

// The planted point is the unique preimage of B x* in the cone when some
// w in row(B) lies in the relative interior of its negated normal face and
// B is injective on the span of its minimal face. For the orthant this is
// exact; for psd it is the generic (strictly complementary) criterion.
bool unique_preimage_orthant(const Mat& b, const Vec& x_star);
bool unique_preimage_psd(const Mat& b, const Vec& x_star);

// null(A) meets the interior of the cone: v in null(A), v >= 1, or
// V in null(A) with V - I psd.
bool null_interior_lp(const Mat& a, const SolverOptions& opt = {});
bool null_interior_sdp(const std::vector<SymVec>& a, const SolverOptions& opt = {});

// Planted models: uniform support with exp(1) magnitudes; G G^T with
// Gaussian d x k factor.
Vec planted_sparse(int d, int k, Rng& rng);
Vec planted_low_rank(int d, int k, Rng& rng);

struct RecoveryConfig {
  RecoveryKind kind = RecoveryKind::lp;
  int d = 0;
  int n = 0;
  int k = 1;
  int trials = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  double tolerance = 1e-6;  // relative recovery tolerance
};

struct RecoveryReport {
  RecoveryConfig config;
  std::vector<RecoveryTrial> trials;
  int valid = 0;
  int recovered = 0;
  double rate() const { return valid ? double(recovered) / valid : 0.0; }
};

// Fresh map and plant per trial.
RecoveryReport recovery_experiment(const RecoveryConfig& cfg);

struct MapRecord {
  int index = 0;
  bool surjective = false;
  bool null_interior = false;
  int plants_valid = 0;
  int plants_recovered = 0;
  int face_checks = 0;
  int face_passes = 0;
  int perturbed_face_checks = 0;
  int perturbed_face_passes = 0;
};

struct StudyReport {
  RecoveryConfig config;
  int plants_per_map = 0;
  bool dimension_flag = false;  // measurement count below the face bound
  std::vector<MapRecord> maps;
  std::vector<RecoveryTrial> trials;  // map-major order
  std::vector<int> trial_map;         // map index of each trial
  int gated_out = 0;                  // maps failing a hypothesis
  // Recovery vs unique preimage: [recovered][unique] counts.
  int agreement[2][2] = {{0, 0}, {0, 0}};
  int agreement_gated[2][2] = {{0, 0}, {0, 0}};
  int joint_success = 0;  // recovered and face check passed
  int joint_total = 0;
  int face_checks = 0;
  int face_passes = 0;
  double agreement_rate(bool gated) const;
  double joint_rate() const { return joint_total ? double(joint_success) / joint_total : 0.0; }
};

// Orthant recovery vs unique preimage vs dual face checks, per random map.
StudyReport dt_equivalence_study(int d, int n, int k, int maps, int plants,
                                 std::uint64_t seed, int jobs = 1);
// The psd analogue of the study above.
StudyReport sdp_equivalence_study(int d, int n, int k, int maps, int plants,
                                  std::uint64_t seed, int jobs = 1);
// Rank <= k recovery jointly with dual face checks at the planted face.
StudyReport most_tc_study(int d, int n, int k, int maps, int plants,
                          std::uint64_t seed, int jobs = 1);

}  // namespace terracini
