#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "sparsest/rng.hpp"

namespace sparsest {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Linear map R^p -> R^n, either held as a dense matrix or regenerated row by
/// row from a seed.
///
/// Row i of a seed-streamed Gaussian operator is gamma * N(0,1)^p drawn from
/// rows().child(i), so operators sharing a row stream agree on shared rows and
/// extending n only appends fresh rows.
class MeasurementOperator {
 public:
  enum class Kind { ExplicitMatrix, SeedStreamedGaussian };

  static MeasurementOperator explicit_matrix(RowMatrix a, double gamma = 1.0);
  static MeasurementOperator seed_streamed_gaussian(RngStream rows, Eigen::Index n, Eigen::Index p, double gamma);

  Kind kind() const noexcept { return kind_; }
  Eigen::Index rows() const noexcept { return n_; }
  Eigen::Index cols() const noexcept { return p_; }
  double gamma() const noexcept { return gamma_; }
  const RngStream& row_stream() const noexcept { return stream_; }
  const RowMatrix& matrix() const;  // ExplicitMatrix only

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& w) const;

  // Writes row i into `out` (length p).
  void row(Eigen::Index i, std::span<double> out) const;

  // Dense copy; for explicit operators a plain copy.
  MeasurementOperator materialize() const;

  std::size_t dense_bytes() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(p_) * sizeof(double);
  }

 private:
  MeasurementOperator() = default;

  Kind kind_ = Kind::ExplicitMatrix;
  Eigen::Index n_ = 0;
  Eigen::Index p_ = 0;
  double gamma_ = 1.0;
  RngStream stream_{0};
  RowMatrix a_;
};

// Row i of the seed-streamed Gaussian ensemble; shared with sketch acquisition.
void gaussian_row(const RngStream& rows, Eigen::Index i, double gamma, std::span<double> out);

}  // namespace sparsest
