#pragma once

#include <span>

#include <Eigen/Core>

#include "sparsest/rng.hpp"
#include "sparsest/stable.hpp"

namespace sparsest {

enum class NoiseLaw { None, UniformSymmetric };

/// Independent bounded measurement noise, |eps_i| <= sigma0.
struct NoiseSpec {
  double sigma0 = 0.0;
  NoiseLaw law = NoiseLaw::None;

  static NoiseSpec none() { return {}; }
  static NoiseSpec uniform(double sigma0) { return {sigma0, sigma0 > 0.0 ? NoiseLaw::UniformSymmetric : NoiseLaw::None}; }
  double bound() const noexcept { return law == NoiseLaw::None ? 0.0 : sigma0; }
};

// Child ids used to split a sketch's RngStream into its independent parts.
namespace streams {
inline constexpr std::uint64_t kCauchyRows = 1;
inline constexpr std::uint64_t kGaussianRows = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kExtraNoise = 4;
}  // namespace streams

/// Cauchy and Gaussian measurements y_i = <a_i, x> + eps_i of one signal.
struct VectorSketch {
  Eigen::VectorXd y_cauchy;
  Eigen::VectorXd y_gauss;
  double gamma = 1.0;
  Eigen::Index p = 0;
  double sigma0 = 0.0;
  RngStream origin{0};

  Eigen::Index n1() const noexcept { return y_cauchy.size(); }
  Eigen::Index n2() const noexcept { return y_gauss.size(); }
  // Row stream of the Gaussian measurements; a seed-streamed operator built
  // on it reproduces rows 0..n2-1 of this sketch.
  RngStream gaussian_rows() const noexcept { return origin.child(streams::kGaussianRows); }
};

/// Takes n1 Cauchy and n2 Gaussian measurements of x with scale gamma.
VectorSketch acquire_sketch(const Signal& x, Eigen::Index n1, Eigen::Index n2, double gamma, const NoiseSpec& noise,
                            const RngStream& rng);

// Adds i.i.d. noise from `noise` to y, drawing from `rng`.
void add_noise(Eigen::VectorXd& y, const NoiseSpec& noise, const RngStream& rng);

/// (1/gamma) * median(|y_i|). Even counts average the two central values.
double estimate_l1(std::span<const double> y_cauchy, double gamma);
/// sqrt(sum y_i^2 / (gamma^2 n)).
double estimate_l2(std::span<const double> y_gauss, double gamma);

inline double estimate_l1(const Eigen::VectorXd& y, double gamma) {
  return estimate_l1(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), gamma);
}
inline double estimate_l2(const Eigen::VectorXd& y, double gamma) {
  return estimate_l2(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), gamma);
}

// Half-widths of the T1 and T2 relative confidence bands for n total
// measurements split evenly.
double ci_delta(double alpha, double rho, Eigen::Index n);
double ci_eta(double alpha, double rho, Eigen::Index n);

/// Upper bound on |s_hat/s - 1| implied by the interval at level alpha.
/// Infinite when eta >= 1.
double relative_error_bound(double alpha, double rho, Eigen::Index n);

struct SketchEstimate {
  double t1_hat = 0.0;
  double t2_hat = 0.0;
  double s_hat_raw = 0.0;
  double s_hat = 0.0;  // clamped to [1, p]
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  Eigen::Index n = 0;         // n1 + n2
  Eigen::Index n_interval = 0;  // measurement count used for delta/eta
  bool unequal_split = false;

  bool covers(double s) const noexcept { return ci_low <= s && s <= ci_high; }
};

/// s_hat = T1^2 / T2^2 with a confidence interval for s(x) at level alpha.
///
/// rho bounds sigma0 / (gamma ||x||_2). A zero rho is refused when the sketch
/// was taken with noise. If n1 != n2 the interval uses n = 2 min(n1, n2) and
/// unequal_split is set.
SketchEstimate estimate_sparsity(const VectorSketch& sketch, double alpha, double rho);

}  // namespace sparsest
