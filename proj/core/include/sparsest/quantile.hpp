#pragma once

namespace sparsest {

// Standard normal CDF.
double normal_cdf(double z);

/// Inverse of the standard normal CDF on (0, 1), accurate well below 1e-8
/// absolute. Throws ParameterError outside (0, 1).
double normal_quantile(double u);

}  // namespace sparsest
