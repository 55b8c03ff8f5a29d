#include "sparsest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "sparsest/adversarial.hpp"
#include "sparsest/errors.hpp"
#include "sparsest/io.hpp"
#include "sparsest/measures.hpp"
#include "sparsest/rank_sketch.hpp"
#include "sparsest/recovery.hpp"
#include "sparsest/sketch.hpp"

namespace sparsest {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::RelativeErrorVsN, "fig2"},
    {ExperimentKind::RelativeErrorVsRho, "fig2-rho"},
    {ExperimentKind::Reconstruction, "fig3"},
    {ExperimentKind::AdversarialDemo, "adversarial"},
    {ExperimentKind::RankCoverage, "rank-coverage"},
};

std::string format_param(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<Eigen::Index> to_index_list(std::string_view text) {
  std::vector<Eigen::Index> out;
  for (auto v : parse_integer_list(text)) out.push_back(static_cast<Eigen::Index>(v));
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw FormatError("unknown experiment '" + std::string(name) +
                    "' (expected fig2, fig2-rho, fig3, adversarial or rank-coverage)");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ParameterError("invalid experiment config: " + what); };
  if (p_grid.empty() || nu_grid.empty() || n_grid.empty() || rho_grid.empty()) fail("grids must be nonempty");
  if (trials < 1) fail("trials must be at least 1");
  for (auto p : p_grid) {
    if (p < 1) fail("p must be positive");
  }
  for (double nu : nu_grid) {
    if (!(nu >= 0.0)) fail("nu must be nonnegative");
  }
  for (double rho : rho_grid) {
    if (!(rho >= 0.0)) fail("rho must be nonnegative");
  }
  for (auto n : n_grid) {
    if (n < (experiment == ExperimentKind::AdversarialDemo ? 0 : 2)) fail("n is too small");
  }
  if (!(gamma > 0.0)) fail("gamma must be positive");
  if (!(sigma0 >= 0.0)) fail("sigma0 must be nonnegative");
  if (!(alpha > 0.0 && alpha < 0.5)) fail("alpha must lie in (0, 1/2)");
  if (n_sketch < 1) fail("n_sketch must be positive");
  if (!(bp_tol > 0.0) || bp_max_iter < 1) fail("basis pursuit tolerance and iteration limit must be positive");
  if (max_retries < 0) fail("max_retries must be nonnegative");
  if (experiment == ExperimentKind::RankCoverage) {
    for (auto p : p_grid) {
      if (rank < 1 || rank > p) fail("rank must lie in [1, p]");
    }
  }
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  switch (kind) {
    case ExperimentKind::RelativeErrorVsN:
      break;
    case ExperimentKind::RelativeErrorVsRho:
      cfg.rho_grid = {0.0, 1e-3, 1e-2, 1e-1};
      break;
    case ExperimentKind::Reconstruction:
      cfg.nu_grid = {0.7, 1.0, 1.3};
      cfg.trials = 25;
      cfg.alpha = 0.05;
      break;
    case ExperimentKind::RankCoverage:
      cfg.p_grid = {100};
      cfg.n_grid = {1000};
      cfg.alpha = 0.05;
      cfg.trials = 500;
      break;
    case ExperimentKind::AdversarialDemo:
      cfg.p_grid = {100, 500};
      cfg.n_grid = {20, 100};
      break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValueConfig& kv) {
  const auto name = kv.get("experiment");
  if (!name) throw FormatError("config must name an experiment (experiment = fig2 | fig2-rho | fig3 | ...)");
  ExperimentConfig cfg = defaults(parse_experiment_kind(*name));
  for (const auto& [key, value] : kv.entries()) {
    if (key == "experiment") continue;
    if (key == "p") {
      cfg.p_grid = to_index_list(value);
    } else if (key == "nu") {
      cfg.nu_grid = parse_real_list(value);
    } else if (key == "n") {
      cfg.n_grid = to_index_list(value);
    } else if (key == "rho") {
      cfg.rho_grid = parse_real_list(value);
    } else if (key == "gamma") {
      cfg.gamma = parse_double(value);
    } else if (key == "sigma0") {
      cfg.sigma0 = parse_double(value);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_integer_list(value).at(0));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_integer_list(value).at(0));
    } else if (key == "n_sketch") {
      cfg.n_sketch = static_cast<Eigen::Index>(parse_integer_list(value).at(0));
    } else if (key == "bp_tol") {
      cfg.bp_tol = parse_double(value);
    } else if (key == "bp_max_iter") {
      cfg.bp_max_iter = static_cast<int>(parse_integer_list(value).at(0));
    } else if (key == "dense_limit_mb") {
      cfg.dense_limit_mb = static_cast<std::size_t>(parse_integer_list(value).at(0));
    } else if (key == "rank") {
      cfg.rank = static_cast<Eigen::Index>(parse_integer_list(value).at(0));
    } else if (key == "max_retries") {
      cfg.max_retries = static_cast<int>(parse_integer_list(value).at(0));
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_integer_list(value).at(0));
    } else {
      throw FormatError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

void apply_environment_overrides(ExperimentConfig& cfg) {
  if (const char* seed = std::getenv("SPARSEST_SEED"); seed != nullptr && *seed != '\0') {
    cfg.seed = static_cast<std::uint64_t>(parse_integer_list(seed).at(0));
  }
}

ResultTable::ResultTable(std::string experiment, std::uint64_t seed, std::vector<std::string> param_names)
    : experiment_(std::move(experiment)), seed_(seed), param_names_(std::move(param_names)) {}

void ResultTable::add(int trial, std::vector<double> params, std::string statistic, double value) {
  if (params.size() != param_names_.size()) throw ParameterError("result row has the wrong number of parameters");
  rows_.push_back({trial, std::move(params), std::move(statistic), value});
}

std::size_t ResultTable::param_index(std::string_view name) const {
  const auto it = std::find(param_names_.begin(), param_names_.end(), name);
  if (it == param_names_.end()) throw ParameterError("no parameter column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - param_names_.begin());
}

std::vector<const ResultTable::Row*> ResultTable::aggregates(std::string_view statistic) const {
  std::vector<const Row*> out;
  for (const auto& row : rows_) {
    if (row.trial < 0 && row.statistic == statistic) out.push_back(&row);
  }
  return out;
}

void ResultTable::write_csv(std::ostream& out) const {
  out << "experiment,seed,trial";
  for (const auto& name : param_names_) out << ',' << name;
  out << ",statistic,value\n";
  for (const auto& row : rows_) {
    out << experiment_ << ',' << seed_ << ',';
    if (row.trial < 0) {
      out << "all";
    } else {
      out << row.trial;
    }
    for (double v : row.params) out << ',' << format_param(v);
    out << ',' << row.statistic << ',' << format_double(row.value) << '\n';
  }
}

Signal make_power_law_signal(Eigen::Index p, double nu) {
  if (p < 1) throw ParameterError("p must be positive");
  if (!(nu >= 0.0)) throw ParameterError("nu must be nonnegative");
  Signal x(p);
  for (Eigen::Index i = 0; i < p; ++i) x[i] = std::pow(static_cast<double>(i + 1), -nu);
  return x / x.norm();
}

Eigen::MatrixXd make_projection_matrix(Eigen::Index p, Eigen::Index rank) {
  if (rank < 1 || rank > p) throw ParameterError("rank must lie in [1, p]");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(p, p);
  X.diagonal().head(rank).setOnes();
  return X;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = worker_count(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto work = [&] {
    while (true) {
      std::size_t i = 0;
      {
        std::lock_guard lock(mutex);
        if (next >= count || failure) return;
        i = next++;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ResultTable run_fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table(std::string(to_string(cfg.experiment)), cfg.seed, {"p", "nu", "s_true", "n", "rho"});
  const RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (auto p : cfg.p_grid) {
    for (double nu : cfg.nu_grid) {
      const Signal x = make_power_law_signal(p, nu);
      const double s_true = numerical_sparsity(x);
      for (auto n : cfg.n_grid) {
        const Eigen::Index n1 = n / 2;
        const Eigen::Index n2 = n - n1;
        for (double rho : cfg.rho_grid) {
          const double sigma0 = rho * cfg.gamma * x.norm();
          const RngStream point_stream = root.child(point++);
          std::vector<double> rel(static_cast<std::size_t>(cfg.trials));
          std::vector<double> s_hat(rel.size());
          std::vector<double> covered(rel.size());
          parallel_for(rel.size(), cfg.threads, [&](std::size_t t) {
            const auto sk = acquire_sketch(x, n1, n2, cfg.gamma, NoiseSpec::uniform(sigma0), point_stream.child(t));
            const auto est = estimate_sparsity(sk, cfg.alpha, rho);
            s_hat[t] = est.s_hat;
            rel[t] = std::abs(est.s_hat / s_true - 1.0);
            covered[t] = est.covers(s_true) ? 1.0 : 0.0;
          });
          const std::vector<double> params{static_cast<double>(p), nu, s_true, static_cast<double>(n), rho};
          for (std::size_t t = 0; t < rel.size(); ++t) {
            const int trial = static_cast<int>(t);
            table.add(trial, params, "s_hat", s_hat[t]);
            table.add(trial, params, "rel_error", rel[t]);
            table.add(trial, params, "covered", covered[t]);
          }
          table.add(-1, params, "mean_rel_error", mean(rel));
          table.add(-1, params, "median_rel_error", median(rel));
          table.add(-1, params, "coverage", mean(covered));
          table.add(-1, params, "theory_bound", relative_error_bound(cfg.alpha, rho, n));
        }
      }
    }
  }
  return table;
}

Fig3Output run_fig3(const ExperimentConfig& cfg) {
  cfg.validate();
  Fig3Output out{ResultTable("fig3", cfg.seed, {"p", "nu", "s_true", "sigma0"}), {}};
  RecoveryProtocol protocol;
  protocol.n_sketch = cfg.n_sketch;
  protocol.alpha = cfg.alpha;
  protocol.bp.tol = cfg.bp_tol;
  protocol.bp.max_iter = cfg.bp_max_iter;
  protocol.dense_limit_bytes = cfg.dense_limit_mb * std::size_t{1} << 20;

  const RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (auto p : cfg.p_grid) {
    for (double nu : cfg.nu_grid) {
      const Signal x = make_power_law_signal(p, nu);
      const double s_true = numerical_sparsity(x);
      const RngStream point_stream = root.child(point++);
      std::vector<ProtocolOutcome> runs(static_cast<std::size_t>(cfg.trials));
      parallel_for(runs.size(), cfg.threads, [&](std::size_t t) {
        runs[t] = recover_with_estimated_sparsity(x, cfg.gamma, cfg.sigma0, point_stream.child(t), protocol);
      });

      const std::vector<double> params{static_cast<double>(p), nu, s_true, cfg.sigma0};
      std::vector<double> rel, n_hat, n_extra, conv;
      for (std::size_t t = 0; t < runs.size(); ++t) {
        const auto& r = runs[t];
        const int trial = static_cast<int>(t);
        out.table.add(trial, params, "rel_error", r.relative_error);
        out.table.add(trial, params, "s_hat", r.estimate.s_hat);
        out.table.add(trial, params, "n_hat", static_cast<double>(r.n_hat));
        out.table.add(trial, params, "n_extra", static_cast<double>(r.n_extra));
        out.table.add(trial, params, "eps0", r.eps0);
        out.table.add(trial, params, "bp_iterations", r.recovery.bp_iterations);
        out.table.add(trial, params, "relative_gap", r.recovery.relative_gap);
        out.table.add(trial, params, "converged", r.recovery.converged ? 1.0 : 0.0);
        rel.push_back(r.relative_error);
        n_hat.push_back(static_cast<double>(r.n_hat));
        n_extra.push_back(static_cast<double>(r.n_extra));
        conv.push_back(r.recovery.converged ? 1.0 : 0.0);
      }
      out.table.add(-1, params, "median_rel_error", median(rel));
      out.table.add(-1, params, "mean_rel_error", mean(rel));
      out.table.add(-1, params, "median_n_hat", median(n_hat));
      out.table.add(-1, params, "max_n_extra", *std::max_element(n_extra.begin(), n_extra.end()));
      out.table.add(-1, params, "converged_fraction", mean(conv));

      // Lower median for even trial counts, ties broken by trial index.
      std::vector<std::size_t> order(runs.size());
      for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return rel[a] < rel[b]; });
      const std::size_t pick = order[(order.size() - 1) / 2];
      out.examples.push_back({nu, static_cast<int>(pick), x, runs[pick].recovery.x_hat, rel[pick], runs[pick].n_hat});
    }
  }
  return out;
}

ResultTable run_rank_coverage(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table("rank-coverage", cfg.seed, {"p", "rank", "r_true", "n", "varrho"});
  const RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (auto p : cfg.p_grid) {
    const Eigen::MatrixXd X = make_projection_matrix(p, cfg.rank);
    const double r_true = effective_rank(X);
    for (auto n : cfg.n_grid) {
      const Eigen::Index n1 = n / 2;
      const Eigen::Index n2 = n - n1;
      for (double varrho : cfg.rho_grid) {
        const double sigma0 = varrho * cfg.gamma * X.norm();
        const RngStream point_stream = root.child(point++);
        std::vector<double> rel(static_cast<std::size_t>(cfg.trials));
        std::vector<double> r_hat(rel.size());
        std::vector<double> covered(rel.size());
        parallel_for(rel.size(), cfg.threads, [&](std::size_t t) {
          const auto sk =
              acquire_matrix_sketch(X, n1, n2, cfg.gamma, NoiseSpec::uniform(sigma0), point_stream.child(t));
          const auto est = estimate_effective_rank(sk, cfg.alpha, varrho);
          r_hat[t] = est.r_hat;
          rel[t] = std::abs(est.r_hat / r_true - 1.0);
          covered[t] = est.covers(r_true) ? 1.0 : 0.0;
        });
        const std::vector<double> params{static_cast<double>(p), static_cast<double>(cfg.rank), r_true,
                                         static_cast<double>(n), varrho};
        for (std::size_t t = 0; t < rel.size(); ++t) {
          table.add(static_cast<int>(t), params, "r_hat", r_hat[t]);
          table.add(static_cast<int>(t), params, "rel_error", rel[t]);
          table.add(static_cast<int>(t), params, "covered", covered[t]);
        }
        table.add(-1, params, "coverage", mean(covered));
        table.add(-1, params, "median_rel_error", median(rel));
      }
    }
  }
  return table;
}

ResultTable run_adversarial_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table("adversarial", cfg.seed, {"p", "n"});
  const RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (auto p : cfg.p_grid) {
    for (auto n : cfg.n_grid) {
      if (n >= p) continue;
      const RngStream point_stream = root.child(point++);
      struct Trial {
        double bound, attained, base, retries, success, residual_ratio;
      };
      std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
      parallel_for(trials.size(), cfg.threads, [&](std::size_t t) {
        const RngStream stream = point_stream.child(t);
        const Eigen::VectorXd entries = draw_stable_vector(StableKind::Gaussian, 1.0, n * p, stream.child(0));
        const Eigen::MatrixXd A = Eigen::Map<const Eigen::MatrixXd>(entries.data(), n, p);
        Signal x = Signal::Zero(p);
        x[0] = 1.0;
        try {
          const auto pair = dense_null_perturbation(A, x, stream.child(1), cfg.max_retries);
          const Eigen::VectorXd diff = pair.x_tilde - pair.x_base;
          const double ratio = (A * diff).norm() / (std::max(A.norm(), 1e-300) * diff.norm());
          trials[t] = {pair.bound, pair.attained_s, pair.base_s, static_cast<double>(pair.retries), 1.0, ratio};
        } catch (const ConstructionError& e) {
          trials[t] = {lemma1_bound(p, n), e.best_sparsity(), 1.0, static_cast<double>(e.attempts()), 0.0,
                       std::nan("")};
        }
      });
      const std::vector<double> params{static_cast<double>(p), static_cast<double>(n)};
      std::vector<double> success, retries;
      for (std::size_t t = 0; t < trials.size(); ++t) {
        const auto& tr = trials[t];
        const int trial = static_cast<int>(t);
        table.add(trial, params, "bound", tr.bound);
        table.add(trial, params, "attained_s", tr.attained);
        table.add(trial, params, "s_base", tr.base);
        table.add(trial, params, "retries", tr.retries);
        table.add(trial, params, "success", tr.success);
        table.add(trial, params, "residual_ratio", tr.residual_ratio);
        success.push_back(tr.success);
        retries.push_back(tr.retries);
      }
      table.add(-1, params, "success_rate", mean(success));
      table.add(-1, params, "median_retries", median(retries));
      table.add(-1, params, "lemma1_bound", lemma1_bound(p, n));
      table.add(-1, params, "minimax_lower_bound", minimax_lower_bound(p, n));
    }
  }
  return table;
}

void write_adversarial_csv(std::ostream& out, const ResultTable& table) {
  const auto ip = table.param_index("p");
  const auto in = table.param_index("n");
  using Key = std::tuple<double, double, int>;
  std::map<Key, std::map<std::string, double>> wide;
  for (const auto& row : table.rows()) {
    if (row.trial < 0) continue;
    wide[{row.params[ip], row.params[in], row.trial}][row.statistic] = row.value;
  }
  out << "p,n,bound,attained_s,s_base,retries\n";
  for (const auto& [key, stats] : wide) {
    const auto get = [&](const char* name) {
      const auto it = stats.find(name);
      return it == stats.end() ? std::nan("") : it->second;
    };
    out << format_param(std::get<0>(key)) << ',' << format_param(std::get<1>(key)) << ','
        << format_double(get("bound")) << ',' << format_double(get("attained_s")) << ','
        << format_double(get("s_base")) << ',' << format_param(get("retries")) << '\n';
  }
}

}  // namespace sparsest
