#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "sparsest/config.hpp"
#include "sparsest/errors.hpp"
#include "sparsest/experiments.hpp"
#include "sparsest/io.hpp"

namespace sparsest {
namespace {

TEST(FormatDouble, RoundTripsBitExact) {
  const double values[] = {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-300, 1.7976931348623157e308,
                           std::numeric_limits<double>::denorm_min(), 123456789.123456789};
  for (double v : values) {
    const double back = parse_double(format_double(v));
    EXPECT_EQ(std::signbit(back), std::signbit(v));
    EXPECT_EQ(back, v) << format_double(v);
  }
  const auto draws = draw_stable_vector(StableKind::Cauchy, 1.0, 1000, RngStream(1000));
  for (double v : draws) EXPECT_EQ(parse_double(format_double(v)), v);
}

TEST(ParseDouble, RejectsGarbage) {
  EXPECT_THROW(parse_double("1.0x"), FormatError);
  EXPECT_THROW(parse_double(""), FormatError);
  EXPECT_DOUBLE_EQ(parse_double("  2.5 "), 2.5);
}

TEST(SketchCsv, VectorRoundTrip) {
  const auto sk = acquire_sketch(make_power_law_signal(50, 1.0), 7, 9, 1.5, NoiseSpec::uniform(1e-3),
                                 RngStream(1001).child(4));
  std::stringstream buf;
  write_sketch_csv(buf, sk);
  const auto back = read_vector_sketch_csv(buf);
  EXPECT_EQ(back.y_cauchy, sk.y_cauchy);
  EXPECT_EQ(back.y_gauss, sk.y_gauss);
  EXPECT_EQ(back.gamma, sk.gamma);
  EXPECT_EQ(back.p, sk.p);
  EXPECT_EQ(back.sigma0, sk.sigma0);
  EXPECT_EQ(back.origin, sk.origin);
  const auto a = estimate_sparsity(sk, 0.05, 0.01);
  const auto b = estimate_sparsity(back, 0.05, 0.01);
  EXPECT_EQ(a.s_hat, b.s_hat);
}

TEST(SketchCsv, MatrixRoundTrip) {
  const auto sk = acquire_matrix_sketch(make_projection_matrix(12, 3), 5, 6, 1.0, NoiseSpec::none(), RngStream(1002));
  std::stringstream buf;
  write_sketch_csv(buf, sk);
  const auto back = read_matrix_sketch_csv(buf);
  EXPECT_EQ(back.y_trace, sk.y_trace);
  EXPECT_EQ(back.y_frob, sk.y_frob);
  EXPECT_EQ(back.p, 12);
  std::stringstream again;
  write_sketch_csv(again, back);
  std::stringstream first;
  write_sketch_csv(first, sk);
  EXPECT_EQ(again.str(), first.str());
}

TEST(SketchCsv, WrongShapeAndCorruption) {
  const auto sk = acquire_sketch(make_power_law_signal(10, 1.0), 2, 2, 1.0, NoiseSpec::none(), RngStream(1003));
  std::stringstream buf;
  write_sketch_csv(buf, sk);
  std::stringstream copy(buf.str());
  EXPECT_THROW(read_matrix_sketch_csv(copy), FormatError);
  std::string text = buf.str();
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  std::stringstream cut(text);
  EXPECT_THROW(read_vector_sketch_csv(cut), FormatError);
}

TEST(SignalCsv, RoundTrip) {
  const Signal x = make_power_law_signal(33, 0.7);
  std::stringstream buf;
  write_signal_csv(buf, x);
  EXPECT_EQ(buf.str().substr(0, 12), "index,value\n");
  EXPECT_EQ(read_signal_csv(buf), x);
  std::stringstream bad("index,value\n0,1\n2,3\n");
  EXPECT_THROW(read_signal_csv(bad), FormatError);
  std::stringstream empty("index,value\n");
  EXPECT_THROW(read_signal_csv(empty), FormatError);
}

TEST(ReconstructionCsv, Header) {
  std::stringstream buf;
  write_reconstruction_csv(buf, Eigen::Vector2d(1, 2), Eigen::Vector2d(0.5, 2));
  EXPECT_EQ(buf.str(), "index,x,x_hat\n0,1,0.5\n1,2,2\n");
  EXPECT_THROW(write_reconstruction_csv(buf, Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3)), ParameterError);
}

TEST(MatrixCsv, RoundTripAndDeclaredSize) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(6, 6);
  X(0, 0) = 2.0;
  X(1, 3) = X(3, 1) = -0.25;
  std::stringstream buf;
  write_matrix_csv(buf, X);
  EXPECT_EQ(read_matrix_csv(buf), X);
  std::stringstream small("row,col,value\n0,0,1\n");
  EXPECT_EQ(read_matrix_csv(small).rows(), 1);
  std::stringstream declared("# p=4\nrow,col,value\n0,0,1\n");
  EXPECT_EQ(read_matrix_csv(declared).rows(), 4);
  std::stringstream conflict("# p=1\nrow,col,value\n2,2,1\n");
  EXPECT_THROW(read_matrix_csv(conflict), FormatError);
}

TEST(OperatorDescriptor, RoundTrip) {
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(1004).child(9), 12, 30, 0.5);
  std::stringstream buf;
  write_operator_descriptor(buf, OperatorDescriptor::of(op));
  const auto back = read_operator_descriptor(buf).instantiate();
  EXPECT_EQ(back.rows(), 12);
  EXPECT_EQ(back.cols(), 30);
  EXPECT_EQ(back.row_stream(), op.row_stream());
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(30, -1, 1);
  EXPECT_EQ(back.apply(v), op.apply(v));
  EXPECT_THROW(OperatorDescriptor::of(op.materialize()), ParameterError);
  std::stringstream bad("kind=dense\nseed=1\nstream=0\nn=1\np=1\ngamma=1\n");
  EXPECT_THROW(read_operator_descriptor(bad), FormatError);
}

TEST(KeyValueConfig, Parsing) {
  const auto cfg = KeyValueConfig::parse("# comment\n p = 100, 1000 \n\nnu=1.0 # trailing\nseed = 7\n");
  EXPECT_EQ(cfg.get("p"), "100, 1000");
  EXPECT_EQ(cfg.get("nu"), "1.0");
  EXPECT_TRUE(cfg.contains("seed"));
  EXPECT_FALSE(cfg.get("missing").has_value());
  EXPECT_THROW(KeyValueConfig::parse("justtext\n"), FormatError);
  EXPECT_THROW(KeyValueConfig::parse("= 3\n"), FormatError);
  EXPECT_EQ(KeyValueConfig::parse("a=1\na=2\n").get("a"), "2");
}

TEST(KeyValueConfig, Lists) {
  EXPECT_EQ(parse_real_list("0.7, 1.0,1.3"), (std::vector<double>{0.7, 1.0, 1.3}));
  EXPECT_EQ(parse_integer_list("100, 1e3, 10000"), (std::vector<std::int64_t>{100, 1000, 10000}));
  EXPECT_THROW(parse_integer_list("1.5"), FormatError);
  EXPECT_THROW(parse_real_list("1,,2"), FormatError);
  EXPECT_THROW(parse_real_list("a"), FormatError);
}

}  // namespace
}  // namespace sparsest
