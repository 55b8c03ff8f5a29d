#include "sparsest/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <Eigen/SVD>

#include "sparsest/errors.hpp"
#include "sparsest/measures.hpp"

namespace sparsest {

namespace {

double dense_denominator(Eigen::Index p) {
  const double t = 1.0 + 2.0 * std::sqrt(2.0 * std::log(2.0 * static_cast<double>(p)));
  return t * t;
}

}  // namespace

Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& A) {
  const Eigen::Index p = A.cols();
  if (p < 1) throw ParameterError("matrix must have at least one column");
  if (!A.allFinite()) throw ParameterError("matrix has non-finite entries");

  Eigen::Index rank = 0;
  Eigen::MatrixXd V;
  if (A.rows() == 0) {
    V = Eigen::MatrixXd::Identity(p, p);
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv[0] : 0.0;
    if (top > 0.0) rank = (sv.array() > 1e-10 * top).count();
    V = svd.matrixV();
  }
  if (rank >= p) throw NoNullSpaceError("matrix has full column rank; its null space is trivial");
  return V.rightCols(p - rank);
}

double lemma1_bound(Eigen::Index p, Eigen::Index n) {
  if (n < 0 || p <= n) throw ParameterError("lemma1_bound requires p > n >= 0");
  return static_cast<double>(p - n) / dense_denominator(p);
}

double minimax_lower_bound(Eigen::Index p, Eigen::Index n) {
  if (p < 1 || n < 0) throw ParameterError("minimax_lower_bound requires p >= 1 and n >= 0");
  const double numerator = 1.0 - static_cast<double>(n + 1) / static_cast<double>(p);
  return std::max(0.0, numerator / (2.0 * dense_denominator(p)));
}

AdversarialPair dense_null_perturbation(const Eigen::MatrixXd& A, const Signal& x, const RngStream& rng,
                                        int max_retries) {
  if (x.size() != A.cols()) throw ParameterError("signal length does not match matrix columns");
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) throw DomainError("base signal must be non-zero");
  if (max_retries < 0) throw ParameterError("max_retries must be nonnegative");

  const Eigen::MatrixXd B = null_space_basis(A);
  AdversarialPair pair;
  pair.x_base = x;
  pair.base_s = numerical_sparsity(x);
  pair.bound = lemma1_bound(A.cols(), A.rows());

  const double scale = x.cwiseAbs().maxCoeff();
  Eigen::VectorXd z(B.cols());
  double best = 0.0;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    auto engine = rng.child(static_cast<std::uint64_t>(attempt)).engine();
    fill_stable(StableKind::Gaussian, 1.0, std::span<double>(z.data(), static_cast<std::size_t>(z.size())), engine);
    Signal candidate = x + scale * (B * z);
    if (candidate.cwiseAbs().maxCoeff() == 0.0) continue;
    const double s = numerical_sparsity(candidate);
    best = std::max(best, s);
    if (s >= pair.bound) {
      pair.x_tilde = std::move(candidate);
      pair.attained_s = s;
      pair.retries = attempt;
      return pair;
    }
  }
  throw ConstructionError("no dense null-space perturbation reached the bound after " +
                              std::to_string(max_retries) + " retries (best s = " + std::to_string(best) + ")",
                          best, max_retries + 1);
}

}  // namespace sparsest
