#include "sparsest/operator.hpp"

#include <vector>

#include "sparsest/errors.hpp"
#include "sparsest/stable.hpp"

namespace sparsest {

void gaussian_row(const RngStream& rows, Eigen::Index i, double gamma, std::span<double> out) {
  auto engine = rows.child(static_cast<std::uint64_t>(i)).engine();
  fill_stable(StableKind::Gaussian, gamma, out, engine);
}

MeasurementOperator MeasurementOperator::explicit_matrix(RowMatrix a, double gamma) {
  if (a.rows() < 1 || a.cols() < 1) throw ParameterError("operator matrix must be non-empty");
  if (!(gamma > 0.0)) throw ParameterError("operator gamma must be positive");
  MeasurementOperator op;
  op.kind_ = Kind::ExplicitMatrix;
  op.n_ = a.rows();
  op.p_ = a.cols();
  op.gamma_ = gamma;
  op.a_ = std::move(a);
  return op;
}

MeasurementOperator MeasurementOperator::seed_streamed_gaussian(RngStream rows, Eigen::Index n, Eigen::Index p,
                                                                double gamma) {
  if (n < 1 || p < 1) throw ParameterError("operator dimensions must be positive");
  if (!(gamma > 0.0)) throw ParameterError("operator gamma must be positive");
  MeasurementOperator op;
  op.kind_ = Kind::SeedStreamedGaussian;
  op.n_ = n;
  op.p_ = p;
  op.gamma_ = gamma;
  op.stream_ = rows;
  return op;
}

const RowMatrix& MeasurementOperator::matrix() const {
  if (kind_ != Kind::ExplicitMatrix) throw ParameterError("operator has no stored matrix");
  return a_;
}

void MeasurementOperator::row(Eigen::Index i, std::span<double> out) const {
  if (i < 0 || i >= n_) throw ParameterError("row index out of range");
  if (static_cast<Eigen::Index>(out.size()) != p_) throw ParameterError("row buffer has wrong length");
  if (kind_ == Kind::ExplicitMatrix) {
    Eigen::Map<Eigen::RowVectorXd>(out.data(), p_) = a_.row(i);
  } else {
    gaussian_row(stream_, i, gamma_, out);
  }
}

Eigen::VectorXd MeasurementOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != p_) throw ParameterError("apply: vector length does not match operator columns");
  if (kind_ == Kind::ExplicitMatrix) return a_ * v;
  Eigen::VectorXd out(n_);
  Eigen::VectorXd buf(p_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    gaussian_row(stream_, i, gamma_, std::span<double>(buf.data(), static_cast<std::size_t>(p_)));
    out[i] = buf.dot(v);
  }
  return out;
}

Eigen::VectorXd MeasurementOperator::apply_transpose(const Eigen::VectorXd& w) const {
  if (w.size() != n_) throw ParameterError("apply_transpose: vector length does not match operator rows");
  if (kind_ == Kind::ExplicitMatrix) return a_.transpose() * w;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p_);
  Eigen::VectorXd buf(p_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    gaussian_row(stream_, i, gamma_, std::span<double>(buf.data(), static_cast<std::size_t>(p_)));
    out.noalias() += w[i] * buf;
  }
  return out;
}

MeasurementOperator MeasurementOperator::materialize() const {
  if (kind_ == Kind::ExplicitMatrix) return *this;
  RowMatrix a(n_, p_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    gaussian_row(stream_, i, gamma_, std::span<double>(a.row(i).data(), static_cast<std::size_t>(p_)));
  }
  return explicit_matrix(std::move(a), gamma_);
}

}  // namespace sparsest
