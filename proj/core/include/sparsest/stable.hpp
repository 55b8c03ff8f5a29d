#pragma once

#include <span>
#include <string_view>

#include <Eigen/Core>

#include "sparsest/rng.hpp"

namespace sparsest {

using Signal = Eigen::VectorXd;

/// Symmetric stable laws S_q(gamma) with characteristic function
/// exp(-|gamma t|^q). Only the two closed-form members are supported.
enum class StableKind { Cauchy, Gaussian };

constexpr int stable_index(StableKind kind) noexcept { return kind == StableKind::Cauchy ? 1 : 2; }
std::string_view to_string(StableKind kind) noexcept;

// Standard (gamma = 1) variates drawn from `engine`.
double standard_gaussian(CounterEngine& engine);
double standard_cauchy(CounterEngine& engine);

// Fills `out` with i.i.d. S_q(gamma) entries. Gaussian entries have standard
// deviation gamma, Cauchy entries have half-width gamma.
void fill_stable(StableKind kind, double gamma, std::span<double> out, CounterEngine& engine);

/// Length-p vector of i.i.d. S_q(gamma) entries drawn from `rng`.
Eigen::VectorXd draw_stable_vector(StableKind kind, double gamma, Eigen::Index p, const RngStream& rng);

/// Scale of <a, x> for a ~ S_q(gamma)^p: gamma*||x||_1 (Cauchy) or gamma*||x||_2 (Gaussian).
double stable_scale_of_projection(StableKind kind, double gamma, const Signal& x);

}  // namespace sparsest
