#include "sparsest/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sparsest/errors.hpp"

namespace sparsest {

namespace {

void require_nonzero(const Signal& x) {
  if (x.size() == 0) throw DomainError("signal is empty");
  if (!x.allFinite()) throw DomainError("signal has non-finite entries");
  if (x.cwiseAbs().maxCoeff() == 0.0) throw DomainError("signal is the zero vector");
}

void require_T(const Signal& x, Eigen::Index T) {
  if (T < 1 || T > x.size()) throw ParameterError("T must lie in [1, p]");
}

// Indices of x ordered by decreasing magnitude, lowest index first among ties.
std::vector<Eigen::Index> magnitude_order(const Signal& x) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(x[a]) > std::abs(x[b]); });
  return idx;
}

}  // namespace

double numerical_sparsity(const Signal& x) {
  require_nonzero(x);
  // Rescale by ||x||_inf so squares cannot overflow or underflow.
  const Signal u = x / x.cwiseAbs().maxCoeff();
  const double l1 = u.lpNorm<1>();
  return l1 * l1 / u.squaredNorm();
}

void validate_psd(const Eigen::MatrixXd& X) {
  if (X.rows() != X.cols() || X.rows() == 0) throw DomainError("matrix must be square and non-empty");
  if (!X.allFinite()) throw DomainError("matrix has non-finite entries");
  const double fro = X.norm();
  if (fro == 0.0) throw DomainError("matrix is zero");
  if ((X - X.transpose()).norm() > 1e-12 * fro) throw DomainError("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * fro) throw DomainError("matrix is not positive semidefinite");
}

double effective_rank(const Eigen::MatrixXd& X) {
  validate_psd(X);
  const double scale = X.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd u = X / scale;
  const double tr = u.trace();
  return tr * tr / u.squaredNorm();
}

Signal best_t_term(const Signal& x, Eigen::Index T) {
  require_T(x, T);
  const auto order = magnitude_order(x);
  Signal out = Signal::Zero(x.size());
  for (Eigen::Index k = 0; k < T; ++k) {
    const auto i = order[static_cast<std::size_t>(k)];
    out[i] = x[i];
  }
  return out;
}

double t_term_relative_error(const Signal& x, Eigen::Index T) {
  require_nonzero(x);
  require_T(x, T);
  const auto order = magnitude_order(x);
  double tail = 0.0;
  for (auto k = static_cast<std::size_t>(T); k < order.size(); ++k) tail += std::abs(x[order[k]]);
  return tail / (std::sqrt(static_cast<double>(T)) * x.norm());
}

double prop1_necessary_T(const Signal& x, double eps) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  return numerical_sparsity(x) / ((1.0 + eps) * (1.0 + eps));
}

Eigen::Index sufficient_T(const Signal& x, double c) {
  const double p = static_cast<double>(x.size());
  const double T = std::ceil(c * numerical_sparsity(x) * std::log(p));
  return std::clamp(static_cast<Eigen::Index>(T), Eigen::Index{1}, x.size());
}

}  // namespace sparsest
