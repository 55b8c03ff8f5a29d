#pragma once

#include <Eigen/Core>

#include "sparsest/rng.hpp"
#include "sparsest/stable.hpp"

namespace sparsest {

/// Orthonormal basis (p x (p - r)) of the null space of A, with r the number
/// of singular values above 1e-10 * sigma_max. Throws NoNullSpaceError when r = p.
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& A);

/// (p - n) / (1 + 2 sqrt(2 ln 2p))^2: the sparsity level a dense null-space
/// perturbation is guaranteed to reach against any n x p design.
double lemma1_bound(Eigen::Index p, Eigen::Index n);

/// Lower bound on the worst-case relative error of any estimator of s(x)
/// from noiseless deterministic measurements y = A x, A in R^{n x p}.
double minimax_lower_bound(Eigen::Index p, Eigen::Index n);

/// Two signals the design A cannot tell apart, one of them dense.
struct AdversarialPair {
  Signal x_base;
  Signal x_tilde;
  double base_s = 0.0;
  double attained_s = 0.0;
  double bound = 0.0;
  int retries = 0;  // draws of z before success (0 = first draw)
};

/// Draws z ~ N(0, I) until x + ||x||_inf B z has s >= lemma1_bound(p, n).
/// Throws ConstructionError (carrying the best s seen) after max_retries.
AdversarialPair dense_null_perturbation(const Eigen::MatrixXd& A, const Signal& x, const RngStream& rng,
                                        int max_retries = 1000);

}  // namespace sparsest
