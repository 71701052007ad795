#pragma once

#include <optional>
#include <string>
#include <vector>

#include "terracini/linalg.hpp"

namespace terracini {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };
const char* to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.99;
};

// Variables are laid out as [free | nonnegative | psd blocks (svec)].
struct ConeDims {
  int free = 0;
  int nonneg = 0;
  std::vector<int> psd;  // matrix sides

  int size() const;
  int degree() const;  // barrier parameter: nonneg + sum of sides
};

struct ConicProblem {
  Vec c;
  Mat a;
  Vec b;
  ConeDims cone;
};

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_failure;
  Vec x;  // primal point in the caller's variable layout
  Vec y;  // equality multipliers
  Vec s;  // dual slack, same layout as x
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  KktResiduals residuals;
  int iterations = 0;
  std::string detail;
};

SolveReport solve_conic(const ConicProblem& p, const SolverOptions& opt = {});

struct LpProblem {
  Vec c;
  Mat a;
  Vec b;
  std::vector<bool> free;  // true: lower bound -inf, false: lower bound 0
};

SolveReport solve_lp(const LpProblem& p, const SolverOptions& opt = {});

struct SdpProblem {
  SymVec c;
  std::vector<SymVec> a;
  Vec b;
};

// x and s of the report are svec coordinates of the d x d matrices.
SolveReport solve_sdp(const SdpProblem& p, const SolverOptions& opt = {});

// A face of the nonpositive orthant or of the negative PSD cone:
//   orthant: {w <= 0 : w_i = 0 for i not in support}
//   psd:     {-Z M Z^T : M psd}, Z with orthonormal columns (d x r)
struct NegatedFace {
  enum class Kind { orthant, psd } kind = Kind::orthant;
  int dim = 0;                // orthant dimension or matrix side
  std::vector<int> support;   // orthant
  Mat z;                      // psd
  int ambient() const;        // coordinate length (svec for psd)
  Subspace span() const;
};

struct RelIntResult {
  bool feasible = false;
  Vec point;             // element of W in the relative interior of N
  double slack = 0.0;    // optimal minimum slack
  std::optional<Mat> reducing_certificate;  // psd only, when not feasible
};

// Finds a point of W in the relative interior of N by maximizing the
// minimum slack. Scale of the point: slacks normalized to average one.
RelIntResult relative_interior_point(const Subspace& w, const NegatedFace& n,
                                     double delta = 1e-6,
                                     const SolverOptions& opt = {});

// span(W ∩ N) for a subspace W and a negated face N. Orthant faces use one
// LP; PSD faces use facial reduction.
Subspace span_of_intersection(const Subspace& w, const NegatedFace& n,
                              double delta = 1e-6,
                              const SolverOptions& opt = {});

// {lambda : B^T lambda in span(N ∩ range(B^T))}, in lambda coordinates.
// B must be surjective.
Subspace span_of_normal_preimage(const Mat& b, const NegatedFace& n,
                                 double delta = 1e-6);

}  // namespace terracini
