#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "sparsest/errors.hpp"
#include "sparsest/experiments.hpp"
#include "sparsest/measures.hpp"
#include "sparsest/recovery.hpp"

namespace sparsest {
namespace {

TEST(AdaptiveBudget, Examples) {
  EXPECT_EQ(adaptive_budget(823.0, 10000), 4111);
  EXPECT_EQ(adaptive_budget(11.0, 10000), 150);
  EXPECT_EQ(adaptive_budget(1.0, 2), 2);
  EXPECT_EQ(adaptive_budget(58.0, 10000), 598);
  // ceil(10.2) = 11.
  EXPECT_EQ(adaptive_budget(10.2, 10000), 150);
}

TEST(AdaptiveBudget, NearPaperValues) {
  const double paper[] = {4108, 590, 150};
  const double s[] = {823, 58, 11};
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(static_cast<double>(adaptive_budget(s[i], 10000)) / paper[i] - 1.0), 0.02);
  }
}

TEST(AdaptiveBudget, MatchesFormula) {
  for (double sh : {1.0, 1.5, 7.3, 42.0, 432.1}) {
    for (Eigen::Index p : {1000, 5000, 10000}) {
      const double k = std::ceil(sh);
      EXPECT_EQ(adaptive_budget(sh, p),
                static_cast<Eigen::Index>(std::ceil(2 * k * std::log(static_cast<double>(p) / k))));
    }
  }
}

TEST(AdaptiveBudget, Errors) {
  EXPECT_THROW(adaptive_budget(10.0, 10), BudgetUndefinedError);
  EXPECT_THROW(adaptive_budget(9.5, 10), BudgetUndefinedError);
  EXPECT_THROW(adaptive_budget(0.5, 10), ParameterError);
  EXPECT_THROW(adaptive_budget(2.0, 0), ParameterError);
}

TEST(Protocol, SparseProfileUsesSketchRowsOnly) {
  const Signal x = make_power_law_signal(1000, 1.3);
  RecoveryProtocol protocol;
  protocol.n_sketch = 500;
  const auto out = recover_with_estimated_sparsity(x, 1.0, 1e-3, RngStream(600), protocol);
  EXPECT_EQ(out.n_extra, 0);
  EXPECT_LT(out.n_hat, 500);
  EXPECT_EQ(out.recovery.x_hat.size(), 1000);
  EXPECT_DOUBLE_EQ(out.eps0, 1e-3 * std::sqrt(500.0));
  EXPECT_TRUE(out.recovery.converged);
  EXPECT_LT(out.relative_error, 0.2);
  EXPECT_NEAR(out.relative_error, (out.recovery.x_hat - x).norm() / x.norm(), 1e-15);
}

TEST(Protocol, DenseProfileDrawsExtraRows) {
  const Signal x = make_power_law_signal(1000, 0.7);
  RecoveryProtocol protocol;
  protocol.n_sketch = 50;
  const auto out = recover_with_estimated_sparsity(x, 1.0, 1e-3, RngStream(601), protocol);
  EXPECT_GT(out.n_extra, 0);
  EXPECT_EQ(out.n_hat, 50 + out.n_extra);
  EXPECT_EQ(out.n_hat, std::min<Eigen::Index>(adaptive_budget(out.estimate.s_hat, 1000), 1000));
  EXPECT_DOUBLE_EQ(out.eps0, 1e-3 * std::sqrt(static_cast<double>(out.n_hat)));
}

TEST(Protocol, NoiselessPathIsEqualityConstrained) {
  const Signal x = make_power_law_signal(400, 1.3);
  RecoveryProtocol protocol;
  protocol.n_sketch = 100;
  const auto out = recover_with_estimated_sparsity(x, 1.0, 0.0, RngStream(602), protocol);
  EXPECT_EQ(out.eps0, 0.0);
  EXPECT_EQ(out.estimate.rho, 0.0);
  EXPECT_LE(out.recovery.residual_norm, 1e-9 * x.norm() * std::sqrt(400.0));
}

TEST(Protocol, StreamedAndDenseOperatorsAgree) {
  const Signal x = make_power_law_signal(300, 1.3);
  RecoveryProtocol dense, streamed;
  dense.n_sketch = streamed.n_sketch = 80;
  streamed.dense_limit_bytes = 0;
  const auto a = recover_with_estimated_sparsity(x, 1.0, 1e-3, RngStream(603), dense);
  const auto b = recover_with_estimated_sparsity(x, 1.0, 1e-3, RngStream(603), streamed);
  EXPECT_EQ(a.n_hat, b.n_hat);
  EXPECT_NEAR(a.recovery.l1_value, b.recovery.l1_value, 1e-5 * a.recovery.l1_value);
}

TEST(Protocol, Deterministic) {
  const Signal x = make_power_law_signal(300, 1.0);
  RecoveryProtocol protocol;
  protocol.n_sketch = 80;
  const auto a = recover_with_estimated_sparsity(x, 1.0, 1e-3, RngStream(604), protocol);
  const auto b = recover_with_estimated_sparsity(x, 1.0, 1e-3, RngStream(604), protocol);
  EXPECT_EQ(a.recovery.x_hat, b.recovery.x_hat);
}

TEST(Protocol, Errors) {
  EXPECT_THROW(recover_with_estimated_sparsity(Eigen::VectorXd::Zero(10), 1.0, 0.0, RngStream(1)), DomainError);
  EXPECT_THROW(recover_with_estimated_sparsity(Eigen::VectorXd::Ones(10), 1.0, -1.0, RngStream(1)), ParameterError);
}

}  // namespace
}  // namespace sparsest
