#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "sparsest/operator.hpp"
#include "sparsest/rank_sketch.hpp"
#include "sparsest/sketch.hpp"

namespace sparsest {

// 17 significant digits: parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Sketch CSV. Header lines "# key=value" record sketch (vector|matrix),
/// gamma, seed, stream, n1, n2, p, sigma0; then the column header
/// "index,kind,value" and one measurement per line. kind is cauchy/gaussian
/// for vector sketches, identity-trace/gaussian-matrix for matrix sketches.
void write_sketch_csv(std::ostream& out, const VectorSketch& sketch);
void write_sketch_csv(std::ostream& out, const MatrixSketch& sketch);
VectorSketch read_vector_sketch_csv(std::istream& in);
MatrixSketch read_matrix_sketch_csv(std::istream& in);

/// Signal CSV: "index,value" header, zero-based indices.
void write_signal_csv(std::ostream& out, const Signal& x);
Signal read_signal_csv(std::istream& in);

/// "index,x,x_hat" side-by-side signal and reconstruction.
void write_reconstruction_csv(std::ostream& out, const Signal& x, const Signal& x_hat);

/// Matrix CSV in triplet form: "row,col,value" header, absent entries are
/// zero. An optional "# p=N" line fixes the dimension; otherwise it is the
/// largest index + 1.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& X);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

/// key=value description of a seed-streamed operator (kind, seed, stream, n, p, gamma).
struct OperatorDescriptor {
  std::string kind = "seed-streamed-gaussian";
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  double gamma = 1.0;

  static OperatorDescriptor of(const MeasurementOperator& op);
  MeasurementOperator instantiate() const;
};
void write_operator_descriptor(std::ostream& out, const OperatorDescriptor& d);
OperatorDescriptor read_operator_descriptor(std::istream& in);

}  // namespace sparsest
