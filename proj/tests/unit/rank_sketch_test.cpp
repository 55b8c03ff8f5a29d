#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "sparsest/errors.hpp"
#include "sparsest/experiments.hpp"
#include "sparsest/measures.hpp"
#include "sparsest/quantile.hpp"
#include "sparsest/rank_sketch.hpp"

namespace sparsest {
namespace {

Eigen::MatrixXd random_psd(Eigen::Index p, Eigen::Index k, std::uint64_t seed) {
  Eigen::MatrixXd B(p, k);
  for (Eigen::Index j = 0; j < k; ++j) B.col(j) = draw_stable_vector(StableKind::Gaussian, 1.0, p, RngStream(seed).child(j));
  return B * B.transpose();
}

TEST(MatrixProbe, MatchesExplicitContraction) {
  const Eigen::MatrixXd X = random_psd(7, 3, 200);
  const RngStream probes(201);
  for (Eigen::Index i = 0; i < 4; ++i) {
    // Z_i is drawn row by row from one engine.
    auto engine = probes.child(static_cast<std::uint64_t>(i)).engine();
    Eigen::MatrixXd Z(7, 7);
    for (Eigen::Index j = 0; j < 7; ++j) {
      Eigen::VectorXd row(7);
      fill_stable(StableKind::Gaussian, 1.0, std::span<double>(row.data(), 7), engine);
      Z.row(j) = row.transpose();
    }
    const double expect = 2.0 * (Z.array() * X.array()).sum();
    EXPECT_NEAR(gaussian_matrix_probe(X, probes, i, 2.0), expect, 1e-12 * std::abs(expect) + 1e-12);
  }
}

TEST(MatrixSketch, TraceProbesAreExactWithoutNoise) {
  const Eigen::MatrixXd X = random_psd(10, 4, 202);
  const auto sk = acquire_matrix_sketch(X, 5, 5, 1.5, NoiseSpec::none(), RngStream(203));
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(sk.y_trace[i], 1.5 * X.trace());
}

TEST(MatrixSketch, RejectsNonPsdAndZero) {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(0, 0) = -1.0;
  EXPECT_THROW(acquire_matrix_sketch(bad, 2, 2, 1.0, NoiseSpec::none(), RngStream(1)), DomainError);
  EXPECT_THROW(acquire_matrix_sketch(Eigen::MatrixXd::Zero(3, 3), 2, 2, 1.0, NoiseSpec::none(), RngStream(1)),
               DomainError);
  EXPECT_THROW(acquire_matrix_sketch(Eigen::MatrixXd::Identity(3, 3), 0, 2, 1.0, NoiseSpec::none(), RngStream(1)),
               ParameterError);
}

TEST(RankEstimate, IntervalFormula) {
  const Eigen::MatrixXd X = make_projection_matrix(50, 10);
  const auto sk = acquire_matrix_sketch(X, 200, 200, 1.0, NoiseSpec::none(), RngStream(204));
  const auto est = estimate_effective_rank(sk, 0.05, 0.0);
  EXPECT_NEAR(est.t1_breve, 10.0, 1e-12);
  EXPECT_NEAR(est.zeta, normal_quantile(0.95) / std::sqrt(400.0), 1e-15);
  const double lo = est.r_hat_raw * std::pow(1 - est.zeta, 2);
  const double hi = est.r_hat_raw * std::pow(1 + est.zeta, 2);
  EXPECT_NEAR(est.ci_low, std::clamp(lo, 1.0, 50.0), 1e-12 * hi);
  EXPECT_NEAR(est.ci_high, std::clamp(hi, 1.0, 50.0), 1e-12 * hi);
  EXPECT_NEAR(est.r_hat / 10.0, 1.0, 0.3);
}

TEST(RankEstimate, Errors) {
  const Eigen::MatrixXd X = make_projection_matrix(20, 4);
  const auto sk = acquire_matrix_sketch(X, 3, 3, 1.0, NoiseSpec::none(), RngStream(205));
  try {
    estimate_effective_rank(sk, 0.05, 0.5);
    ADD_FAILURE() << "expected a hypothesis violation";
  } catch (const HypothesisViolation& e) {
    EXPECT_EQ(e.parameter(), "zeta_n");
  }
  EXPECT_THROW(estimate_effective_rank(sk, 0.6, 0.0), ParameterError);
  const auto noisy = acquire_matrix_sketch(X, 3, 3, 1.0, NoiseSpec::uniform(0.1), RngStream(205));
  EXPECT_THROW(estimate_effective_rank(noisy, 0.05, 0.0), ParameterError);
}

TEST(RankEstimate, ScaleInvariant) {
  const Eigen::MatrixXd X = random_psd(12, 5, 206);
  const auto a = estimate_effective_rank(acquire_matrix_sketch(X, 50, 50, 1.0, NoiseSpec::none(), RngStream(207)),
                                         0.05, 0.0);
  const auto b = estimate_effective_rank(
      acquire_matrix_sketch(Eigen::MatrixXd(3e4 * X), 50, 50, 1.0, NoiseSpec::none(), RngStream(207)), 0.05, 0.0);
  EXPECT_NEAR(a.r_hat_raw, b.r_hat_raw, 1e-11 * a.r_hat_raw);
}

TEST(RankEstimate, CoverageNearNominal) {
  const Eigen::MatrixXd X = make_projection_matrix(40, 8);
  const double r = effective_rank(X);
  int covered = 0;
  for (int t = 0; t < 300; ++t) {
    const auto sk = acquire_matrix_sketch(X, 300, 300, 1.0, NoiseSpec::none(), RngStream(208).child(t));
    covered += estimate_effective_rank(sk, 0.05, 0.0).covers(r);
  }
  EXPECT_GE(covered / 300.0, 0.85);
}

}  // namespace
}  // namespace sparsest
