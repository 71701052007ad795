#include <doctest.h>

#include <cmath>

#include "terracini/errors.hpp"
#include "terracini/random.hpp"
#include "terracini/recovery.hpp"

using namespace terracini;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Probability that a uniformly random (d - n)-dimensional subspace of R^d
// meets the open positive orthant (Wendel's formula).
double wendel(int d, int n) {
  double s = 0.0;
  for (int i = 0; i <= d - n - 1; ++i) s += std::tgamma(d) / (std::tgamma(i + 1) * std::tgamma(d - i));
  return s / std::pow(2.0, d - 1);
}

}  // namespace

TEST_CASE("gaussian psd maps") {
  auto a = gaussian_map_psd(4, 6, 11);
  auto b = gaussian_map_psd(4, 6, 11);
  REQUIRE(a.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(a[i].coords == b[i].coords);
  CHECK(gaussian_map_psd(3, 1, 2).size() == 1);
  Mat m = a[0].to_matrix();
  CHECK((m - m.transpose()).norm() == 0.0);

  // Diagonal entries keep variance 1/n.
  const int n = 5;
  double ss = 0.0;
  int count = 0;
  for (int s = 0; s < 2000; ++s)
    for (const SymVec& ai : gaussian_map_psd(10, n, 1000 + s)) {
      Mat x = ai.to_matrix();
      for (int i = 0; i < 10; ++i) ss += x(i, i) * x(i, i);
      count += 10;
    }
  CHECK(std::abs(ss / count * n - 1.0) <= 0.05);
}

TEST_CASE("lp recovery examples") {
  Vec x = vec({0, 2.5, 0, 1});
  RecoveryTrial t = exact_recovery_trial_lp(Mat::Identity(4, 4), x);
  CHECK(t.valid);
  CHECK(t.recovered);
  CHECK(t.k == 2);

  t = exact_recovery_trial_lp(Mat::Ones(1, 3), vec({1, 0, 0}));
  CHECK(t.valid);
  CHECK_FALSE(t.recovered);

  RecoveryReport r = recovery_experiment({RecoveryKind::lp, 30, 15, 1, 100, 9, 1});
  CHECK(r.valid == 100);
  CHECK(r.rate() >= 0.9);
  CHECK_THROWS_AS(exact_recovery_trial_lp(Mat::Identity(2, 2), vec({1, -1})), Error);
}

TEST_CASE("sdp recovery examples") {
  const int d = 3;
  std::vector<SymVec> basis;
  for (int i = 0; i < sym_dim(d); ++i) basis.emplace_back(d, Vec::Unit(sym_dim(d), i));
  Rng rng(5);
  Vec x = planted_low_rank(d, 2, rng);
  RecoveryTrial t = exact_recovery_trial_sdp(basis, x);
  CHECK(t.valid);
  CHECK(t.recovered);
  CHECK(t.k == 2);

  RecoveryReport r = recovery_experiment({RecoveryKind::sdp, 4, 12, 1, 50, 9, 1});
  CHECK(r.valid == 50);
  CHECK(r.rate() >= 0.9);

  int recovered = 0;
  for (int s = 0; s < 10; ++s) {
    auto a = gaussian_map_psd(4, 1, 40 + s);
    Rng g(s);
    RecoveryTrial one = exact_recovery_trial_sdp(a, planted_low_rank(4, 1, g));
    recovered += one.valid && one.recovered;
  }
  CHECK(recovered <= 2);
}

TEST_CASE("unique preimage examples") {
  // Injective B: always unique.
  CHECK(unique_preimage_orthant(Mat::Identity(3, 3), vec({1, 0, 2})));
  // null(B) = span{(1, -2, 1)}.
  Mat b(2, 3);
  b << 1, 1, 1, 1, 0, -1;
  CHECK_FALSE(unique_preimage_orthant(b, vec({0, 1, 0})));
  CHECK(unique_preimage_orthant(b, vec({1, 0, 0})));
  CHECK(unique_preimage_orthant(b, vec({0, 0, 1})));

  // psd, B = (tr, X11) at diag(1, 0).
  Mat bp(2, 3);
  bp.row(0) = svec(Mat::Identity(2, 2)).transpose();
  bp.row(1) = Vec::Unit(3, 0).transpose();
  Vec x = svec(Vec(vec({1, 0})).asDiagonal().toDenseMatrix());
  CHECK(unique_preimage_psd(bp, x));
  // (tr) alone: diag(1, 0) and diag(0, 1) share the image.
  CHECK_FALSE(unique_preimage_psd(bp.topRows(1), x));
}

TEST_CASE("null-interior examples") {
  CHECK(null_interior_lp(Mat::Zero(1, 3)));
  CHECK_FALSE(null_interior_lp(Mat::Identity(3, 3)));
  CHECK(null_interior_sdp({SymVec(2, Vec::Zero(3))}));
  std::vector<SymVec> basis;
  for (int i = 0; i < 3; ++i) basis.emplace_back(2, Vec::Unit(3, i));
  CHECK_FALSE(null_interior_sdp(basis));
  // A single trace-zero constraint leaves the identity in the null space.
  Mat tz = Mat::Zero(2, 2);
  tz(0, 0) = 1;
  tz(1, 1) = -1;
  CHECK(null_interior_sdp({SymVec::from_matrix(tz)}));
}

TEST_CASE("null-interior rate of gaussian maps follows Wendel") {
  for (int n : {2, 3, 5}) {
    int hits = 0;
    for (int s = 0; s < 100; ++s) hits += null_interior_lp(gaussian_map_lp(10, n, s));
    const double p = wendel(10, n);
    const double sd = std::sqrt(p * (1 - p) / 100);
    CHECK(std::abs(hits / 100.0 - p) <= 3 * sd + 0.01);
  }
}

TEST_CASE("recovery agrees with unique preimage") {
  // LP trials across several sparsities with the hypotheses gated.
  int lp_total = 0, lp_agree = 0;
  for (int k : {1, 2, 3, 4}) {
    StudyReport r = dt_equivalence_study(10, 4, k, 12, 6, 70 + k);
    lp_total += r.agreement_gated[0][0] + r.agreement_gated[0][1] +
                r.agreement_gated[1][0] + r.agreement_gated[1][1];
    lp_agree += r.agreement_gated[0][0] + r.agreement_gated[1][1];
  }
  CHECK(lp_total >= 100);
  CHECK(lp_agree == lp_total);

  // SDP trials where null(A) meets the interior: d = 4, n = 4.
  StudyReport s = sdp_equivalence_study(4, 4, 2, 12, 10, 81);
  int sdp_total = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) sdp_total += s.agreement_gated[i][j];
  MESSAGE("gated sdp trials: " << sdp_total);
  CHECK(sdp_total >= 60);
  CHECK(s.agreement_rate(true) == 1.0);
}

TEST_CASE("recovery rate is non-increasing in k") {
  double prev = 1.0;
  for (int k = 1; k <= 5; ++k) {
    RecoveryReport r = recovery_experiment({RecoveryKind::lp, 20, 8, k, 60, 123, 1});
    CHECK(r.rate() <= prev + 0.05);
    prev = r.rate();
  }
  CHECK(prev < 0.9);
}

TEST_CASE("studies are deterministic and parallel-safe") {
  StudyReport a = dt_equivalence_study(8, 4, 1, 4, 5, 99, 1);
  StudyReport b = dt_equivalence_study(8, 4, 1, 4, 5, 99, 3);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].planted == b.trials[i].planted);
    CHECK(a.trials[i].recovered == b.trials[i].recovered);
    CHECK(a.trials[i].error == b.trials[i].error);
  }
  CHECK(a.gated_out == b.gated_out);
}

TEST_CASE("dt study: small n makes both sides fail together") {
  StudyReport r = dt_equivalence_study(10, 2, 9, 5, 4, 7);
  CHECK(r.agreement[1][1] + r.agreement[1][0] == 0);
  CHECK(r.agreement[0][0] == 20);
}

TEST_CASE("most-tc study with full measurements passes") {
  StudyReport r = most_tc_study(3, sym_dim(3), 1, 3, 4, 5);
  CHECK(r.joint_rate() == 1.0);
  CHECK_FALSE(r.dimension_flag);
  // Two measurements cannot pin down rank-2 matrices.
  StudyReport small = most_tc_study(4, 2, 2, 4, 5, 6);
  CHECK(small.dimension_flag);
  int recovered = 0;
  for (const RecoveryTrial& t : small.trials) recovered += t.recovered;
  CHECK(recovered <= 2);
}
