#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparsest/errors.hpp"
#include "sparsest/quantile.hpp"

namespace sparsest {
namespace {

TEST(NormalQuantile, FrozenValues) {
  // Frozen from the bisection/series oracle (and 30-digit references for the tails).
  EXPECT_NEAR(oracle::quantile_bisect(0.75), 0.6744897501960817, 1e-12);
  EXPECT_NEAR(oracle::quantile_bisect(0.95), 1.6448536269514727, 1e-12);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.75), 0.6744897501960817, 1e-8);
  EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514727, 1e-8);
  EXPECT_NEAR(normal_quantile(0.975), 1.9599639845400542, 1e-8);
  EXPECT_NEAR(normal_quantile(0.999), 3.0902323061678135, 1e-8);
  EXPECT_NEAR(normal_quantile(1e-6), -4.7534243088228989, 1e-8);
  EXPECT_NEAR(normal_quantile(0.999999), 4.7534243088228989, 1e-8);
  EXPECT_NEAR(normal_quantile(1e-12), -7.0344838253011319, 1e-8);
}

TEST(NormalQuantile, AgreesWithIndependentOracleOnGrid) {
  for (double u = 0.001; u < 0.9995; u += 0.0137) {
    EXPECT_NEAR(normal_quantile(u), oracle::quantile_bisect(u), 1e-8) << "u=" << u;
  }
}

TEST(NormalQuantile, InvertsCdfAndIsAntisymmetric) {
  for (double u : {1e-10, 1e-5, 0.02, 0.3, 0.6, 0.9, 0.99999}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(u)), u, 1e-12 + 1e-9 * u);
  }
  // Away from the tails the rounding in 1 - u is negligible.
  for (double u : {0.0078125, 0.02, 0.3, 0.25, 0.5}) {
    EXPECT_NEAR(normal_quantile(1.0 - u), -normal_quantile(u), 1e-12);
  }
}

TEST(NormalQuantile, RejectsOutsideOpenInterval) {
  for (double u : {0.0, 1.0, -0.1, 1.5, std::nan("")}) EXPECT_THROW(normal_quantile(u), ParameterError);
}

TEST(NormalCdf, MatchesSeries) {
  for (double z = -3.0; z <= 3.0; z += 0.25) EXPECT_NEAR(normal_cdf(z), oracle::phi_series(z), 1e-13);
}

}  // namespace
}  // namespace sparsest
