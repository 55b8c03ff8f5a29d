#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "sparsest/basis_pursuit.hpp"
#include "sparsest/rng.hpp"
#include "sparsest/sketch.hpp"

namespace sparsest {

/// ceil(2 * ceil(s_hat) * ln(p / ceil(s_hat))). Throws BudgetUndefinedError
/// when ceil(s_hat) >= p; callers should then measure with n = p.
Eigen::Index adaptive_budget(double s_hat, Eigen::Index p);

struct RecoveryProtocol {
  Eigen::Index n_sketch = 500;  // n1 = n2
  double alpha = 0.05;          // level of the reported interval
  BasisPursuitOptions bp{};
  // Seed-streamed operators up to this many bytes are materialized for speed.
  std::size_t dense_limit_bytes = std::size_t{1} << 30;
};

struct ProtocolOutcome {
  RecoveryResult recovery;
  SketchEstimate estimate;
  Eigen::Index n_hat = 0;    // budget from the rule (p when undefined)
  Eigen::Index n_extra = 0;  // Gaussian rows drawn beyond the sketch
  double eps0 = 0.0;
  double relative_error = 0.0;  // ||x_hat - x|| / ||x||
};

/// Full pipeline on a known signal: sketch with n1 = n2 = n_sketch, estimate
/// s(x), size the budget, reuse the sketch's Gaussian rows (adding fresh rows
/// when the budget exceeds them), then Basis Pursuit with eps0 = sigma0 sqrt(n).
ProtocolOutcome recover_with_estimated_sparsity(const Signal& x, double gamma, double sigma0, const RngStream& rng,
                                                const RecoveryProtocol& protocol = {});

}  // namespace sparsest
