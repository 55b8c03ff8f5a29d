#include "sparsest/stable.hpp"

#include <boost/random/normal_distribution.hpp>

#include "sparsest/errors.hpp"

namespace sparsest {

std::string_view to_string(StableKind kind) noexcept {
  return kind == StableKind::Cauchy ? "cauchy" : "gaussian";
}

double standard_gaussian(CounterEngine& engine) {
  // Boost's normal_distribution is an exact ziggurat sampler and holds no
  // cached state between calls, so the draw depends only on the engine.
  boost::random::normal_distribution<double> normal;
  return normal(engine);
}

double standard_cauchy(CounterEngine& engine) {
  // Ratio of independent standard normals is exactly standard Cauchy.
  boost::random::normal_distribution<double> normal;
  const double num = normal(engine);
  double den = normal(engine);
  while (den == 0.0) den = normal(engine);
  return num / den;
}

void fill_stable(StableKind kind, double gamma, std::span<double> out, CounterEngine& engine) {
  if (!(gamma > 0.0)) throw ParameterError("stable scale gamma must be positive");
  boost::random::normal_distribution<double> normal;
  if (kind == StableKind::Gaussian) {
    for (double& v : out) v = gamma * normal(engine);
    return;
  }
  for (double& v : out) {
    const double num = normal(engine);
    double den = normal(engine);
    while (den == 0.0) den = normal(engine);
    v = gamma * (num / den);
  }
}

Eigen::VectorXd draw_stable_vector(StableKind kind, double gamma, Eigen::Index p, const RngStream& rng) {
  if (p < 1) throw ParameterError("stable vector length must be at least 1");
  if (!(gamma > 0.0)) throw ParameterError("stable scale gamma must be positive");
  Eigen::VectorXd out(p);
  auto engine = rng.engine();
  fill_stable(kind, gamma, std::span<double>(out.data(), static_cast<std::size_t>(p)), engine);
  return out;
}

double stable_scale_of_projection(StableKind kind, double gamma, const Signal& x) {
  if (!(gamma > 0.0)) throw ParameterError("stable scale gamma must be positive");
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    throw ParameterError("projection scale is undefined for the zero vector");
  }
  return kind == StableKind::Cauchy ? gamma * x.lpNorm<1>() : gamma * x.norm();
}

}  // namespace sparsest
