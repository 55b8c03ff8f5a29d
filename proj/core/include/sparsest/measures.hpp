#pragma once

#include <Eigen/Core>

#include "sparsest/stable.hpp"

namespace sparsest {

/// s(x) = ||x||_1^2 / ||x||_2^2. Lies in [1, ||x||_0]. Throws DomainError for x = 0.
double numerical_sparsity(const Signal& x);

/// r(X) = tr(X)^2 / ||X||_F^2 for a symmetric PSD matrix. Throws DomainError
/// for the zero matrix or when validate_psd rejects X.
double effective_rank(const Eigen::MatrixXd& X);

// Throws DomainError unless X is symmetric to 1e-12*||X||_F and its smallest
// eigenvalue is >= -1e-10*||X||_F.
void validate_psd(const Eigen::MatrixXd& X);

/// Best T-term approximation: keeps the T largest-magnitude entries, zeroes
/// the rest. Ties at the threshold keep the lowest indices.
Signal best_t_term(const Signal& x, Eigen::Index T);

/// (1/sqrt(T)) * ||x - x_T||_1 / ||x||_2.
double t_term_relative_error(const Signal& x, Eigen::Index T);

/// s(x) / (1 + eps)^2: any T reaching t_term_relative_error <= eps is at least this large.
double prop1_necessary_T(const Signal& x, double eps);

// Smallest T with T >= c * s(x) * ln(p), capped at p.
Eigen::Index sufficient_T(const Signal& x, double c = 2.0);

}  // namespace sparsest
