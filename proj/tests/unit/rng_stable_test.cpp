#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparsest/errors.hpp"
#include "sparsest/rng.hpp"
#include "sparsest/stable.hpp"

namespace sparsest {
namespace {

TEST(RngStream, SamePairReproducesSequence) {
  auto a = RngStream(42, 7).engine();
  auto b = RngStream(42, 7).engine();
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStream, DistinctStreamsDiffer) {
  auto a = RngStream(42, 7).engine();
  auto b = RngStream(42, 8).engine();
  auto c = RngStream(43, 7).engine();
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a();
    same_ab += va == b();
    same_ac += va == c();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RngStream, ChildrenAreDistinctAndStable) {
  const RngStream root(1);
  std::set<std::uint64_t> ids;
  for (std::uint64_t i = 0; i < 10000; ++i) ids.insert(root.child(i).stream());
  EXPECT_EQ(ids.size(), 10000u);
  EXPECT_EQ(root.child(5), RngStream(1).child(5));
  EXPECT_NE(root.child(5).child(0), root.child(0).child(5));
}

TEST(RngStream, IndependentStreamsAreUncorrelated) {
  // Correlation of 1e5 paired uniforms from sibling streams; SE = 1/sqrt(n).
  auto a = RngStream(9).child(0).engine();
  auto b = RngStream(9).child(1).engine();
  const int n = 100000;
  double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform_open(), v = b.uniform_open();
    sab += u * v;
    sa += u;
    sb += v;
    saa += u * u;
    sbb += v * v;
  }
  const double cov = sab / n - sa / n * sb / n;
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(n));
}

TEST(CounterEngine, UniformOpenStaysInsideUnitInterval) {
  auto e = RngStream(3).engine();
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = e.uniform_open();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(CounterEngine, WorksWithStandardDistributions) {
  auto e = RngStream(11).engine();
  std::uniform_int_distribution<int> die(1, 6);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 60000; ++i) ++counts[static_cast<std::size_t>(die(e))];
  for (int face = 1; face <= 6; ++face) EXPECT_NEAR(counts[static_cast<std::size_t>(face)], 10000, 400);
}

TEST(Stable, GaussianSampleVarianceMatchesGammaSquared) {
  const Eigen::VectorXd v = draw_stable_vector(StableKind::Gaussian, 1.0, 100000, RngStream(2014));
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / (v.size() - 1);
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(1e5));
}

TEST(Stable, CauchyMedianAbsoluteValueIsGamma) {
  const Eigen::VectorXd v = draw_stable_vector(StableKind::Cauchy, 2.0, 100000, RngStream(2015));
  std::vector<double> mag(v.data(), v.data() + v.size());
  for (double& m : mag) m = std::abs(m);
  EXPECT_NEAR(oracle::median_by_sort(mag), 2.0, 0.05);
}

TEST(Stable, CauchyQuartilesMatchInverseCdf) {
  // Quartiles of C(0,1) are -1 and +1; the 0.9 quantile is tan(0.4 pi).
  const Eigen::VectorXd v = draw_stable_vector(StableKind::Cauchy, 1.0, 200000, RngStream(77));
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  auto q = [&](double u) { return s[static_cast<std::size_t>(u * static_cast<double>(s.size()))]; };
  EXPECT_NEAR(q(0.25), -1.0, 0.03);
  EXPECT_NEAR(q(0.75), 1.0, 0.03);
  EXPECT_NEAR(q(0.9), std::tan(0.4 * std::numbers::pi), 0.08);
}

TEST(Stable, GaussianTailProbabilityMatchesNormalLaw) {
  const Eigen::VectorXd v = draw_stable_vector(StableKind::Gaussian, 1.0, 200000, RngStream(78));
  const double frac = (v.array().abs() > 1.959963984540054).cast<double>().mean();
  EXPECT_NEAR(frac, 0.05, 4.0 * std::sqrt(0.05 * 0.95 / 2e5));
}

TEST(Stable, SeededDrawsAreDeterministic) {
  const auto a = draw_stable_vector(StableKind::Gaussian, 1.0, 3, RngStream(5, 1));
  const auto b = draw_stable_vector(StableKind::Gaussian, 1.0, 3, RngStream(5, 1));
  EXPECT_EQ(a, b);
}

TEST(Stable, ScaleEquivariance) {
  for (auto kind : {StableKind::Cauchy, StableKind::Gaussian}) {
    const auto a = draw_stable_vector(kind, 1.0, 1000, RngStream(6));
    const auto b = draw_stable_vector(kind, 3.5, 1000, RngStream(6));
    for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(b[i], 3.5 * a[i]);
  }
}

TEST(Stable, RejectsBadParameters) {
  EXPECT_THROW(draw_stable_vector(StableKind::Gaussian, 0.0, 3, RngStream(1)), ParameterError);
  EXPECT_THROW(draw_stable_vector(StableKind::Cauchy, -1.0, 3, RngStream(1)), ParameterError);
  EXPECT_THROW(draw_stable_vector(StableKind::Cauchy, 1.0, 0, RngStream(1)), ParameterError);
}

TEST(Stable, ProjectionScale) {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  e1[0] = 1.0;
  EXPECT_DOUBLE_EQ(stable_scale_of_projection(StableKind::Cauchy, 1.0, e1), 1.0);
  EXPECT_DOUBLE_EQ(stable_scale_of_projection(StableKind::Gaussian, 3.0, Eigen::VectorXd::Ones(4)), 6.0);
  EXPECT_DOUBLE_EQ(stable_scale_of_projection(StableKind::Cauchy, 1.0, Eigen::Vector3d(1, -2, 3)), 6.0);
  EXPECT_THROW(stable_scale_of_projection(StableKind::Cauchy, 1.0, Eigen::VectorXd::Zero(3)), ParameterError);
}

TEST(Stable, IndexAndNames) {
  EXPECT_EQ(stable_index(StableKind::Cauchy), 1);
  EXPECT_EQ(stable_index(StableKind::Gaussian), 2);
  EXPECT_EQ(to_string(StableKind::Cauchy), "cauchy");
  EXPECT_EQ(to_string(StableKind::Gaussian), "gaussian");
}

// Fact 1: <a, x> ~ S_q(gamma^q ||x||_q^q).
TEST(Stable, CauchyProjectionMedianIsL1Norm) {
  const Eigen::Vector3d x(0.5, -1.5, 2.0);
  const int n = 100000;
  std::vector<double> mag(n);
  Eigen::VectorXd a(3);
  for (int i = 0; i < n; ++i) {
    a = draw_stable_vector(StableKind::Cauchy, 1.0, 3, RngStream(31).child(static_cast<std::uint64_t>(i)));
    mag[static_cast<std::size_t>(i)] = std::abs(a.dot(x));
  }
  const double l1 = x.lpNorm<1>();
  const double se = std::numbers::pi / 2.0 * l1 / std::sqrt(4.0 * n);
  EXPECT_NEAR(oracle::median_by_sort(mag), l1, 3.0 * se);
}

TEST(Stable, GaussianProjectionSecondMomentIsL2Squared) {
  const Eigen::Vector4d x(1.0, -2.0, 0.5, 0.0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto a = draw_stable_vector(StableKind::Gaussian, 1.0, 4, RngStream(32).child(static_cast<std::uint64_t>(i)));
    sum += std::pow(a.dot(x), 2);
  }
  EXPECT_NEAR(sum / n, x.squaredNorm(), 3.0 * std::sqrt(2.0 / n) * x.squaredNorm());
}

}  // namespace
}  // namespace sparsest
