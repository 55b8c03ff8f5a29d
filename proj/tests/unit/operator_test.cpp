#include <gtest/gtest.h>

#include "sparsest/errors.hpp"
#include "sparsest/operator.hpp"
#include "sparsest/stable.hpp"

namespace sparsest {
namespace {

TEST(Operator, ExplicitAppliesMatrix) {
  RowMatrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  const auto op = MeasurementOperator::explicit_matrix(a);
  EXPECT_EQ(op.kind(), MeasurementOperator::Kind::ExplicitMatrix);
  EXPECT_EQ(op.apply(Eigen::Vector3d(1, 0, -1)), Eigen::Vector2d(-2, -2));
  EXPECT_EQ(op.apply_transpose(Eigen::Vector2d(1, 1)), Eigen::Vector3d(5, 7, 9));
  EXPECT_THROW(op.apply(Eigen::Vector2d(1, 1)), ParameterError);
  EXPECT_THROW(op.apply_transpose(Eigen::Vector3d(1, 1, 1)), ParameterError);
  EXPECT_THROW(MeasurementOperator::explicit_matrix(RowMatrix(0, 3)), ParameterError);
}

TEST(Operator, StreamedAdjointIdentity) {
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(300), 40, 90, 1.0);
  for (std::uint64_t t = 0; t < 5; ++t) {
    const auto v = draw_stable_vector(StableKind::Gaussian, 1.0, 90, RngStream(301).child(t));
    const auto w = draw_stable_vector(StableKind::Gaussian, 1.0, 40, RngStream(302).child(t));
    const double lhs = op.apply(v).dot(w);
    const double rhs = v.dot(op.apply_transpose(w));
    EXPECT_NEAR(lhs, rhs, 1e-10 * (std::abs(lhs) + 1.0));
  }
}

TEST(Operator, RowsAreRegenerable) {
  const auto a = MeasurementOperator::seed_streamed_gaussian(RngStream(303), 10, 25, 2.0);
  const auto b = MeasurementOperator::seed_streamed_gaussian(RngStream(303), 30, 25, 2.0);
  Eigen::VectorXd ra(25), rb(25), rg(25);
  for (Eigen::Index i = 0; i < 10; ++i) {
    a.row(i, std::span<double>(ra.data(), 25));
    b.row(i, std::span<double>(rb.data(), 25));
    gaussian_row(RngStream(303), i, 2.0, std::span<double>(rg.data(), 25));
    EXPECT_EQ(ra, rb);
    EXPECT_EQ(ra, rg);
  }
  Eigen::VectorXd again(25);
  a.row(3, std::span<double>(again.data(), 25));
  a.row(3, std::span<double>(ra.data(), 25));
  EXPECT_EQ(again, ra);
}

TEST(Operator, MaterializeAgrees) {
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(304), 15, 33, 0.5);
  const auto dense = op.materialize();
  EXPECT_EQ(dense.kind(), MeasurementOperator::Kind::ExplicitMatrix);
  EXPECT_EQ(dense.rows(), 15);
  EXPECT_EQ(dense.cols(), 33);
  EXPECT_EQ(op.dense_bytes(), 15u * 33u * sizeof(double));
  const auto v = draw_stable_vector(StableKind::Gaussian, 1.0, 33, RngStream(305));
  const auto w = draw_stable_vector(StableKind::Gaussian, 1.0, 15, RngStream(306));
  EXPECT_LE((op.apply(v) - dense.apply(v)).norm(), 1e-12 * op.apply(v).norm());
  EXPECT_LE((op.apply_transpose(w) - dense.apply_transpose(w)).norm(), 1e-12 * op.apply_transpose(w).norm());
  EXPECT_THROW(op.matrix(), ParameterError);
}

TEST(Operator, EntriesHaveScaleGamma) {
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(307), 200, 200, 3.0).materialize();
  const double var = op.matrix().squaredNorm() / (200.0 * 200.0);
  EXPECT_NEAR(var, 9.0, 0.3);
}

}  // namespace
}  // namespace sparsest
