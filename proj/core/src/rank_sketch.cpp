#include "sparsest/rank_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsest/errors.hpp"
#include "sparsest/measures.hpp"
#include "sparsest/quantile.hpp"

namespace sparsest {

double gaussian_matrix_probe(const Eigen::MatrixXd& X, const RngStream& probes, Eigen::Index i, double gamma) {
  const Eigen::Index p = X.rows();
  auto engine = probes.child(static_cast<std::uint64_t>(i)).engine();
  Eigen::VectorXd zrow(p);
  double acc = 0.0;
  // Z_i is never stored: row j is drawn and contracted with column j of X
  // (X is symmetric, and column access is contiguous in Eigen's default layout).
  for (Eigen::Index j = 0; j < p; ++j) {
    fill_stable(StableKind::Gaussian, 1.0, std::span<double>(zrow.data(), static_cast<std::size_t>(p)), engine);
    acc += zrow.dot(X.col(j));
  }
  return gamma * acc;
}

MatrixSketch acquire_matrix_sketch(const Eigen::MatrixXd& X, Eigen::Index n1, Eigen::Index n2, double gamma,
                                   const NoiseSpec& noise, const RngStream& rng) {
  validate_psd(X);
  if (n1 < 1 || n2 < 1) throw ParameterError("n1 and n2 must be at least 1");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");

  MatrixSketch sk;
  sk.gamma = gamma;
  sk.p = X.rows();
  sk.sigma0 = noise.bound();
  sk.origin = rng;
  sk.y_trace = Eigen::VectorXd::Constant(n1, gamma * X.trace());
  sk.y_frob.resize(n2);
  const RngStream probes = rng.child(streams::kGaussianRows);
  for (Eigen::Index i = 0; i < n2; ++i) sk.y_frob[i] = gaussian_matrix_probe(X, probes, i, gamma);

  const RngStream noise_stream = rng.child(streams::kNoise);
  add_noise(sk.y_trace, noise, noise_stream.child(0));
  add_noise(sk.y_frob, noise, noise_stream.child(1));
  return sk;
}

RankEstimate estimate_effective_rank(const MatrixSketch& sketch, double alpha, double varrho) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha must lie in (0, 1/2)");
  if (varrho < 0.0) throw ParameterError("varrho must be nonnegative");
  if (sketch.n1() < 1 || sketch.n2() < 1) throw ParameterError("matrix sketch needs both probe sets");
  if (varrho == 0.0 && sketch.sigma0 > 0.0) {
    throw ParameterError("varrho = 0 is inconsistent with a noisy sketch");
  }

  RankEstimate est;
  est.alpha = alpha;
  est.varrho = varrho;
  est.t1_breve = sketch.y_trace.mean() / sketch.gamma;
  est.t2_breve = std::sqrt(sketch.y_frob.squaredNorm() /
                           (sketch.gamma * sketch.gamma * static_cast<double>(sketch.n2())));
  if (est.t2_breve == 0.0) throw DegenerateSketchError("Frobenius estimate is zero");

  const double p = static_cast<double>(sketch.p);
  est.r_hat_raw = (est.t1_breve * est.t1_breve) / (est.t2_breve * est.t2_breve);
  est.r_hat = std::clamp(est.r_hat_raw, 1.0, p);

  est.n = sketch.n1() + sketch.n2();
  est.unequal_split = sketch.n1() != sketch.n2();
  est.n_interval = est.unequal_split ? 2 * std::min(sketch.n1(), sketch.n2()) : est.n;
  est.zeta = normal_quantile(1.0 - alpha) / std::sqrt(static_cast<double>(est.n_interval)) + varrho;
  if (est.zeta >= 1.0) {
    throw HypothesisViolation("zeta_n", est.zeta,
                              "zeta_n = z/sqrt(n) + varrho = " + std::to_string(est.zeta) + " must be < 1");
  }

  const double lo_factor = (1.0 - est.zeta) / (1.0 + varrho);
  const double hi_factor = (1.0 + est.zeta) / (1.0 - varrho);
  est.ci_low = std::clamp(est.r_hat_raw * lo_factor * lo_factor, 1.0, p);
  est.ci_high = std::clamp(est.r_hat_raw * hi_factor * hi_factor, 1.0, p);
  return est;
}

}  // namespace sparsest
