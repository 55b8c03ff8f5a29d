#include "sparsest/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sparsest/errors.hpp"
#include "sparsest/operator.hpp"
#include "sparsest/quantile.hpp"

namespace sparsest {

namespace {

double median_abs(std::span<const double> y) {
  std::vector<double> a(y.size());
  std::transform(y.begin(), y.end(), a.begin(), [](double v) { return std::abs(v); });
  const std::size_t mid = a.size() / 2;
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
  const double upper = a[mid];
  if (a.size() % 2 == 1) return upper;
  const double lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha must lie in (0, 1/2)");
}

}  // namespace

void add_noise(Eigen::VectorXd& y, const NoiseSpec& noise, const RngStream& rng) {
  if (noise.sigma0 < 0.0) throw ParameterError("sigma0 must be nonnegative");
  if (noise.law == NoiseLaw::None || noise.sigma0 == 0.0) return;
  auto engine = rng.engine();
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise.sigma0 * (2.0 * engine.uniform_open() - 1.0);
}

VectorSketch acquire_sketch(const Signal& x, Eigen::Index n1, Eigen::Index n2, double gamma, const NoiseSpec& noise,
                            const RngStream& rng) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) throw DomainError("cannot sketch the zero signal");
  if (n1 < 1 || n2 < 1) throw ParameterError("n1 and n2 must be at least 1");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");

  const Eigen::Index p = x.size();
  VectorSketch sk;
  sk.gamma = gamma;
  sk.p = p;
  sk.sigma0 = noise.bound();
  sk.origin = rng;
  sk.y_cauchy.resize(n1);
  sk.y_gauss.resize(n2);

  Eigen::VectorXd row(p);
  const std::span<double> buf(row.data(), static_cast<std::size_t>(p));
  const RngStream cauchy_rows = rng.child(streams::kCauchyRows);
  for (Eigen::Index i = 0; i < n1; ++i) {
    auto engine = cauchy_rows.child(static_cast<std::uint64_t>(i)).engine();
    fill_stable(StableKind::Cauchy, gamma, buf, engine);
    sk.y_cauchy[i] = row.dot(x);
  }
  const RngStream gauss_rows = sk.gaussian_rows();
  for (Eigen::Index i = 0; i < n2; ++i) {
    gaussian_row(gauss_rows, i, gamma, buf);
    sk.y_gauss[i] = row.dot(x);
  }

  const RngStream noise_stream = rng.child(streams::kNoise);
  add_noise(sk.y_cauchy, noise, noise_stream.child(0));
  add_noise(sk.y_gauss, noise, noise_stream.child(1));
  return sk;
}

double estimate_l1(std::span<const double> y_cauchy, double gamma) {
  if (y_cauchy.empty()) throw ParameterError("estimate_l1 needs at least one measurement");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  return median_abs(y_cauchy) / gamma;
}

double estimate_l2(std::span<const double> y_gauss, double gamma) {
  if (y_gauss.empty()) throw ParameterError("estimate_l2 needs at least one measurement");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  double sum = 0.0;
  for (double v : y_gauss) sum += v * v;
  return std::sqrt(sum / (gamma * gamma * static_cast<double>(y_gauss.size())));
}

double ci_delta(double alpha, double rho, Eigen::Index n) {
  check_alpha(alpha);
  if (n < 1) throw ParameterError("n must be positive");
  if (rho < 0.0) throw ParameterError("rho must be nonnegative");
  const double z = normal_quantile(1.0 - alpha);
  return std::numbers::pi * z / std::sqrt(2.0 * static_cast<double>(n)) + rho;
}

double ci_eta(double alpha, double rho, Eigen::Index n) {
  check_alpha(alpha);
  if (n < 1) throw ParameterError("n must be positive");
  if (rho < 0.0) throw ParameterError("rho must be nonnegative");
  const double z = normal_quantile(1.0 - alpha);
  return z / std::sqrt(static_cast<double>(n)) + rho;
}

double relative_error_bound(double alpha, double rho, Eigen::Index n) {
  const double delta = ci_delta(alpha, rho, n);
  const double eta = ci_eta(alpha, rho, n);
  if (eta >= 1.0) return std::numeric_limits<double>::infinity();
  const double hi = (1.0 + delta) / (1.0 - eta);
  const double lo = std::max(0.0, 1.0 - delta) / (1.0 + eta);
  return std::max(hi * hi - 1.0, 1.0 - lo * lo);
}

SketchEstimate estimate_sparsity(const VectorSketch& sketch, double alpha, double rho) {
  check_alpha(alpha);
  if (rho < 0.0) throw ParameterError("rho must be nonnegative");
  if (rho == 0.0 && sketch.sigma0 > 0.0) {
    throw ParameterError("rho = 0 is inconsistent with a noisy sketch; pass a bound on sigma0/(gamma*||x||_2)");
  }

  SketchEstimate est;
  est.alpha = alpha;
  est.rho = rho;
  est.t1_hat = estimate_l1(sketch.y_cauchy, sketch.gamma);
  est.t2_hat = estimate_l2(sketch.y_gauss, sketch.gamma);
  if (est.t2_hat == 0.0) throw DegenerateSketchError("T2 estimate is zero; the Gaussian sketch carries no signal");

  const double p = static_cast<double>(sketch.p);
  est.s_hat_raw = (est.t1_hat * est.t1_hat) / (est.t2_hat * est.t2_hat);
  est.s_hat = std::clamp(est.s_hat_raw, 1.0, p);

  est.n = sketch.n1() + sketch.n2();
  est.unequal_split = sketch.n1() != sketch.n2();
  est.n_interval = est.unequal_split ? 2 * std::min(sketch.n1(), sketch.n2()) : est.n;
  est.delta = ci_delta(alpha, rho, est.n_interval);
  est.eta = ci_eta(alpha, rho, est.n_interval);
  if (est.eta >= 1.0) {
    throw HypothesisViolation("eta_n", est.eta,
                              "eta_n = z/sqrt(n) + rho = " + std::to_string(est.eta) +
                                  " must be < 1; reduce rho or increase n");
  }

  const double lo_factor = (1.0 - est.eta) / (1.0 + est.delta);
  const double ci_low = est.s_hat_raw * lo_factor * lo_factor;
  double ci_high = std::numeric_limits<double>::infinity();
  if (est.delta < 1.0) {
    const double hi_factor = (1.0 + est.eta) / (1.0 - est.delta);
    ci_high = est.s_hat_raw * hi_factor * hi_factor;
  }
  est.ci_low = std::clamp(ci_low, 1.0, p);
  est.ci_high = std::clamp(ci_high, 1.0, p);
  return est;
}

}  // namespace sparsest
