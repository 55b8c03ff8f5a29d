#include "sparsest/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "sparsest/errors.hpp"
#include "sparsest/operator.hpp"

namespace sparsest {

Eigen::Index adaptive_budget(double s_hat, Eigen::Index p) {
  if (!(s_hat >= 1.0)) throw ParameterError("s_hat must be at least 1");
  if (p < 1) throw ParameterError("p must be positive");
  const double k = std::ceil(s_hat);
  if (k >= static_cast<double>(p)) {
    throw BudgetUndefinedError("ceil(s_hat) >= p leaves the budget undefined; measure with n = p");
  }
  return static_cast<Eigen::Index>(std::ceil(2.0 * k * std::log(static_cast<double>(p) / k)));
}

ProtocolOutcome recover_with_estimated_sparsity(const Signal& x, double gamma, double sigma0, const RngStream& rng,
                                                const RecoveryProtocol& protocol) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) throw DomainError("cannot recover the zero signal");
  if (sigma0 < 0.0) throw ParameterError("sigma0 must be nonnegative");
  const Eigen::Index p = x.size();
  const Eigen::Index n0 = protocol.n_sketch;
  const NoiseSpec noise = NoiseSpec::uniform(sigma0);

  ProtocolOutcome out;
  const VectorSketch sketch = acquire_sketch(x, n0, n0, gamma, noise, rng);
  // rho from the known signal; only the reported interval depends on it.
  const double rho = sigma0 / (gamma * x.norm());
  out.estimate = estimate_sparsity(sketch, protocol.alpha, rho);

  try {
    out.n_hat = std::min(adaptive_budget(out.estimate.s_hat, p), p);
  } catch (const BudgetUndefinedError&) {
    out.n_hat = p;
  }

  const Eigen::Index n_rows = std::max(out.n_hat, n0);
  out.n_extra = n_rows - n0;

  MeasurementOperator op = MeasurementOperator::seed_streamed_gaussian(sketch.gaussian_rows(), n_rows, p, gamma);
  Eigen::VectorXd y(n_rows);
  y.head(n0) = sketch.y_gauss;
  if (out.n_extra > 0) {
    Eigen::VectorXd extra(out.n_extra);
    Eigen::VectorXd row(p);
    for (Eigen::Index i = 0; i < out.n_extra; ++i) {
      op.row(n0 + i, std::span<double>(row.data(), static_cast<std::size_t>(p)));
      extra[i] = row.dot(x);
    }
    add_noise(extra, noise, rng.child(streams::kExtraNoise));
    y.tail(out.n_extra) = extra;
  }
  if (op.dense_bytes() <= protocol.dense_limit_bytes) op = op.materialize();

  out.eps0 = sigma0 * std::sqrt(static_cast<double>(n_rows));
  out.recovery = basis_pursuit(op, y, out.eps0, protocol.bp);
  out.relative_error = (out.recovery.x_hat - x).norm() / x.norm();
  return out;
}

}  // namespace sparsest
