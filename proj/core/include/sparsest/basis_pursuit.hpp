#pragma once

#include <limits>

#include <Eigen/Core>

#include "sparsest/operator.hpp"

namespace sparsest {

struct BasisPursuitOptions {
  double tol = 1e-6;           // certified relative gap on ||x||_1
  int max_iter = 5000;         // projected-gradient iterations, all subproblems
  double feasibility_slack = 1e-6;
  int cg_max_iter = 2000;
};

struct RecoveryResult {
  Eigen::VectorXd x_hat;
  Eigen::Index n_used = 0;
  int bp_iterations = 0;
  int cg_iterations = 0;
  int newton_updates = 0;
  double residual_norm = 0.0;
  double l1_value = 0.0;
  double dual_bound = 0.0;  // certified lower bound on the optimal ||x||_1
  double relative_gap = std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Euclidean projection onto {v : ||v||_1 <= radius}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

/// Solves min ||v||_1 subject to ||A v - y||_2 <= eps0.
///
/// Root-finding on the Pareto curve: each step solves an l1-constrained least
/// squares problem by spectral projected gradient, then updates the l1 radius
/// by Newton's method. Candidates come from a minimum-norm feasibility
/// correction of the iterate or, for explicit matrices, from an active-set
/// solve on its support (simplex pivots when eps0 = 0); optimality is
/// certified by the dual bound (y'z - eps0 ||z||) with z = r / ||A'r||_inf.
///
/// Feasibility holds to eps0 * (1 + feasibility_slack), plus 1e-11 ||y|| when
/// eps0 = 0. If max_iter is exhausted the best point is returned with
/// converged = false. Throws InfeasibleError when no v meets the constraint.
RecoveryResult basis_pursuit(const MeasurementOperator& A, const Eigen::VectorXd& y, double eps0,
                             const BasisPursuitOptions& options = {});

}  // namespace sparsest
