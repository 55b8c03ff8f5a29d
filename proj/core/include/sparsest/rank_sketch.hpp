#pragma once

#include <Eigen/Core>

#include "sparsest/rng.hpp"
#include "sparsest/sketch.hpp"

namespace sparsest {

/// Trace probes y_i = <gamma I, X> + eps_i and Frobenius probes
/// y_i = <gamma Z_i, X> + eps_i of a PSD matrix.
struct MatrixSketch {
  Eigen::VectorXd y_trace;
  Eigen::VectorXd y_frob;
  double gamma = 1.0;
  Eigen::Index p = 0;
  double sigma0 = 0.0;
  RngStream origin{0};

  Eigen::Index n1() const noexcept { return y_trace.size(); }
  Eigen::Index n2() const noexcept { return y_frob.size(); }
};

// <gamma Z_i, X> for the i-th Gaussian probe of `probes`, with Z_i streamed row by row.
double gaussian_matrix_probe(const Eigen::MatrixXd& X, const RngStream& probes, Eigen::Index i, double gamma);

MatrixSketch acquire_matrix_sketch(const Eigen::MatrixXd& X, Eigen::Index n1, Eigen::Index n2, double gamma,
                                   const NoiseSpec& noise, const RngStream& rng);

struct RankEstimate {
  double t1_breve = 0.0;  // trace estimate
  double t2_breve = 0.0;  // Frobenius-norm estimate
  double r_hat_raw = 0.0;
  double r_hat = 0.0;  // clamped to [1, p]
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.0;
  double varrho = 0.0;
  double zeta = 0.0;
  Eigen::Index n = 0;
  Eigen::Index n_interval = 0;
  bool unequal_split = false;

  bool covers(double r) const noexcept { return ci_low <= r && r <= ci_high; }
};

/// r_hat = T1^2 / T2^2 and the interval r in [r_hat((1-zeta)/(1+varrho))^2, r_hat((1+zeta)/(1-varrho))^2].
RankEstimate estimate_effective_rank(const MatrixSketch& sketch, double alpha, double varrho);

}  // namespace sparsest
