#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sparsest/config.hpp"
#include "sparsest/stable.hpp"

namespace sparsest {

enum class ExperimentKind { RelativeErrorVsN, RelativeErrorVsRho, Reconstruction, AdversarialDemo, RankCoverage };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);

/// Declarative description of one simulation sweep.
///
/// Grids combine as a Cartesian product. For the relative-error sweeps
/// n_grid holds total measurement counts n = n1 + n2 split evenly, and
/// sigma0 = rho * gamma * ||x||_2 per grid point. The reconstruction sweep
/// uses nu_grid, sigma0 and n_sketch; the rank sweep uses n_grid, rho_grid
/// (as varrho) and rank; the adversarial demo uses n_grid as design rows.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::RelativeErrorVsN;
  std::vector<Eigen::Index> p_grid{1000};
  std::vector<double> nu_grid{1.0};
  std::vector<Eigen::Index> n_grid{250, 500, 1000, 2000, 4000};
  std::vector<double> rho_grid{1e-2};
  double gamma = 1.0;
  double sigma0 = 1e-3;
  double alpha = 0.25;
  int trials = 100;
  std::uint64_t seed = 20140101;

  Eigen::Index n_sketch = 500;
  double bp_tol = 1e-6;
  int bp_max_iter = 5000;
  std::size_t dense_limit_mb = 1024;

  Eigen::Index rank = 10;
  int max_retries = 1000;

  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;

  /// Defaults for an experiment kind, at desk scale (p = 1000).
  static ExperimentConfig defaults(ExperimentKind kind);
  /// Parses key = value text on top of defaults(experiment).
  static ExperimentConfig from_key_values(const KeyValueConfig& kv);
};

// Applies SPARSEST_SEED from the environment, if set.
void apply_environment_overrides(ExperimentConfig& cfg);

/// Long-format results: one (trial, parameters, statistic, value) per row.
/// Aggregate rows carry trial = -1 and print as "all".
class ResultTable {
 public:
  struct Row {
    int trial;
    std::vector<double> params;
    std::string statistic;
    double value;
  };

  ResultTable(std::string experiment, std::uint64_t seed, std::vector<std::string> param_names);

  void add(int trial, std::vector<double> params, std::string statistic, double value);

  const std::string& experiment() const noexcept { return experiment_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<std::string>& param_names() const noexcept { return param_names_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }
  std::size_t param_index(std::string_view name) const;

  // Aggregate (trial = -1) rows of `statistic`, in insertion order.
  std::vector<const Row*> aggregates(std::string_view statistic) const;

  void write_csv(std::ostream& out) const;

 private:
  std::string experiment_;
  std::uint64_t seed_;
  std::vector<std::string> param_names_;
  std::vector<Row> rows_;
};

/// x_i = i^-nu (1-based), normalized to unit Euclidean norm.
Signal make_power_law_signal(Eigen::Index p, double nu);
/// diag(1, ..., 1, 0, ..., 0) with `rank` ones.
Eigen::MatrixXd make_projection_matrix(Eigen::Index p, Eigen::Index rank);

double median(std::vector<double> values);

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be
// written to per-index slots; the order of execution is unspecified.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

ResultTable run_fig2(const ExperimentConfig& cfg);

struct ReconstructionExample {
  double nu = 0.0;
  int trial = 0;
  Signal x;
  Signal x_hat;
  double relative_error = 0.0;
  Eigen::Index n_hat = 0;
};

struct Fig3Output {
  ResultTable table;
  std::vector<ReconstructionExample> examples;  // median-error run per nu
};

Fig3Output run_fig3(const ExperimentConfig& cfg);

ResultTable run_rank_coverage(const ExperimentConfig& cfg);

ResultTable run_adversarial_demo(const ExperimentConfig& cfg);
// Wide CSV "p,n,bound,attained_s,s_base,retries" from an adversarial table.
void write_adversarial_csv(std::ostream& out, const ResultTable& table);

}  // namespace sparsest
