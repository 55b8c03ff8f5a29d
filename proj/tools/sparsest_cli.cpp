// sparsest: command-line front end for the sketching, recovery and experiment library.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsest/adversarial.hpp"
#include "sparsest/config.hpp"
#include "sparsest/errors.hpp"
#include "sparsest/experiments.hpp"
#include "sparsest/io.hpp"
#include "sparsest/measures.hpp"
#include "sparsest/rank_sketch.hpp"
#include "sparsest/recovery.hpp"
#include "sparsest/sketch.hpp"
#include "sparsest/svg.hpp"

namespace fs = std::filesystem;
using namespace sparsest;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print(const std::string& key, const std::string& value) { std::cout << key << '=' << value << '\n'; }
void print(const std::string& key, double value) { print(key, fmt(value)); }

std::uint64_t seed_or_env(std::uint64_t fallback, bool explicit_flag, std::uint64_t flag_value) {
  if (explicit_flag) return flag_value;
  if (const char* env = std::getenv("SPARSEST_SEED"); env != nullptr && *env != '\0') {
    return static_cast<std::uint64_t>(parse_integer_list(env).at(0));
  }
  return fallback;
}

fs::path output_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty()) {
    dir = flag;
  } else if (const char* env = std::getenv("SPARSEST_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    dir = env;
  }
  fs::create_directories(dir);
  return dir;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  return out;
}

// Parameters that take more than one value in `table`, from `candidates`.
std::vector<std::string> varying(const ResultTable& table, const std::vector<std::string>& candidates) {
  std::vector<std::string> out;
  for (const auto& name : candidates) {
    const auto idx = table.param_index(name);
    std::set<double> values;
    for (const auto& row : table.rows()) values.insert(row.params[idx]);
    if (values.size() > 1) out.push_back(name);
  }
  return out;
}

void write_svg(const fs::path& path, const LinePlot& plot) {
  auto out = open_out(path);
  plot.render(out);
}

void write_fig2_outputs(const ResultTable& table, const fs::path& dir) {
  const std::string name = table.experiment();
  {
    auto out = open_out(dir / (name + ".csv"));
    table.write_csv(out);
  }
  const auto keys = varying(table, {"p", "nu", "rho"});
  for (const std::string stat : {"median_rel_error", "mean_rel_error"}) {
    LinePlot plot;
    plot.title = name + ": " + stat;
    plot.x_label = "n";
    plot.y_label = "|s_hat/s - 1|";
    plot.log_x = plot.log_y = true;
    plot.series = series_from_table(table, stat, "n", keys);
    for (auto bound : series_from_table(table, "theory_bound", "n", keys)) {
      bound.label = "bound " + bound.label;
      bound.dashed = true;
      bound.markers = false;
      plot.series.push_back(std::move(bound));
    }
    write_svg(dir / (name + "_" + stat + ".svg"), plot);
  }
}

ExperimentConfig load_config(const std::string& name, const std::string& path, const std::vector<std::string>& sets) {
  KeyValueConfig kv;
  if (!path.empty()) {
    auto in = open_in(path);
    kv = KeyValueConfig::parse(in);
  }
  for (const auto& assignment : sets) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw FormatError("--set expects key=value, got '" + assignment + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }
  if (const auto cfg_name = kv.get("experiment"); cfg_name && *cfg_name != name) {
    throw FormatError("config names experiment '" + *cfg_name + "' but '" + name + "' was requested");
  }
  kv.set("experiment", name);
  ExperimentConfig cfg = ExperimentConfig::from_key_values(kv);
  apply_environment_overrides(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-based estimation of numerical sparsity and effective rank, with adaptive recovery"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate s(x) and a confidence interval from a stable sketch");
  std::string signal_path, sketch_in, sketch_out;
  Eigen::Index est_p = 1000, n1 = 500, n2 = 500;
  double est_nu = 1.0, gamma = 1.0, sigma0 = 0.0, alpha = 0.05, rho = -1.0;
  std::uint64_t seed = 20140101;
  estimate->add_option("--signal", signal_path, "Signal CSV (index,value); default is a power-law signal");
  estimate->add_option("--p", est_p, "Dimension of the generated power-law signal");
  estimate->add_option("--nu", est_nu, "Power-law exponent of the generated signal");
  estimate->add_option("--sketch-in", sketch_in, "Estimate from a saved sketch CSV instead of measuring");
  estimate->add_option("--sketch-out", sketch_out, "Save the acquired sketch as CSV");
  estimate->add_option("--n1", n1, "Cauchy measurements");
  estimate->add_option("--n2", n2, "Gaussian measurements");
  estimate->add_option("--gamma", gamma, "Scale of the measurement rows");
  estimate->add_option("--sigma0", sigma0, "Noise half-width (Uniform[-sigma0, sigma0])");
  estimate->add_option("--rho", rho, "Noise-to-signal ratio for the interval (default sigma0/(gamma ||x||_2))");
  estimate->add_option("--alpha", alpha, "Interval level: coverage at least (1-2 alpha)^2");
  auto* est_seed = estimate->add_option("--seed", seed, "Seed (overrides SPARSEST_SEED)");

  // rank
  auto* rank = app.add_subcommand("rank", "Estimate the effective rank of a PSD matrix from a Gaussian sketch");
  std::string matrix_path;
  Eigen::Index proj_p = 100, proj_rank = 10;
  double varrho = -1.0;
  rank->add_option("--matrix", matrix_path, "Matrix CSV (row,col,value); default is a projection matrix");
  rank->add_option("--p", proj_p, "Dimension of the generated projection matrix");
  rank->add_option("--rank", proj_rank, "Rank of the generated projection matrix");
  rank->add_option("--sketch-in", sketch_in, "Estimate from a saved matrix sketch CSV");
  rank->add_option("--sketch-out", sketch_out, "Save the acquired sketch as CSV");
  rank->add_option("--n1", n1, "Trace measurements");
  rank->add_option("--n2", n2, "Gaussian matrix measurements");
  rank->add_option("--gamma", gamma, "Scale of the probes");
  rank->add_option("--sigma0", sigma0, "Noise half-width");
  rank->add_option("--varrho", varrho, "Noise-to-signal ratio for the interval (default sigma0/(gamma ||X||_F))");
  rank->add_option("--alpha", alpha, "Interval level: coverage at least 1-2 alpha");
  auto* rank_seed = rank->add_option("--seed", seed, "Seed (overrides SPARSEST_SEED)");

  // recover
  auto* recover = app.add_subcommand("recover", "Estimate s(x), size the budget, then reconstruct by Basis Pursuit");
  std::string out_flag;
  Eigen::Index n_sketch = 500;
  double rec_sigma0 = 1e-3, bp_tol = 1e-6;
  int bp_max_iter = 5000;
  recover->add_option("--signal", signal_path, "Signal CSV (index,value); default is a power-law signal");
  recover->add_option("--p", est_p, "Dimension of the generated power-law signal");
  recover->add_option("--nu", est_nu, "Power-law exponent of the generated signal");
  recover->add_option("--n-sketch", n_sketch, "Cauchy and Gaussian sketch size (n1 = n2)");
  recover->add_option("--gamma", gamma, "Scale of the measurement rows");
  recover->add_option("--sigma0", rec_sigma0, "Noise half-width");
  recover->add_option("--alpha", alpha, "Level of the reported sparsity interval");
  recover->add_option("--bp-tol", bp_tol, "Relative duality-gap tolerance of Basis Pursuit");
  recover->add_option("--bp-max-iter", bp_max_iter, "Iteration limit of Basis Pursuit");
  recover->add_option("--output", out_flag, "Output directory (default SPARSEST_OUTPUT_DIR or .)");
  auto* rec_seed = recover->add_option("--seed", seed, "Seed (overrides SPARSEST_SEED)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a simulation sweep and write CSV and SVG output");
  std::string exp_name, config_path;
  std::vector<std::string> sets;
  experiment->add_option("name", exp_name, "fig2 | fig2-rho | fig3 | rank-coverage | adversarial")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig2-rho", "fig3", "rank-coverage", "adversarial"}));
  experiment->add_option("--config", config_path, "key = value config file");
  experiment->add_option("--set", sets, "Override one config key (key=value); repeatable");
  experiment->add_option("--output", out_flag, "Output directory (default SPARSEST_OUTPUT_DIR or .)");

  // adversarial-demo
  auto* adversarial = app.add_subcommand("adversarial-demo", "Construct a null-space perturbation of e_1 with large s");
  Eigen::Index adv_p = 100, adv_n = 20;
  int retries = 1000;
  adversarial->add_option("--p", adv_p, "Signal dimension");
  adversarial->add_option("--n", adv_n, "Rows of the Gaussian design");
  adversarial->add_option("--max-retries", retries, "Retry limit for the construction");
  adversarial->add_option("--output", out_flag, "Output directory (default SPARSEST_OUTPUT_DIR or .)");
  auto* adv_seed = adversarial->add_option("--seed", seed, "Seed (overrides SPARSEST_SEED)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) {
      seed = seed_or_env(seed, est_seed->count() > 0, seed);
      VectorSketch sk;
      double s_true = 0.0;
      if (!sketch_in.empty()) {
        auto in = open_in(sketch_in);
        sk = read_vector_sketch_csv(in);
        if (rho < 0.0) {
          if (sk.sigma0 > 0.0) throw ParameterError("--rho is required when estimating from a noisy saved sketch");
          rho = 0.0;
        }
      } else {
        Signal x;
        if (!signal_path.empty()) {
          auto in = open_in(signal_path);
          x = read_signal_csv(in);
        } else {
          x = make_power_law_signal(est_p, est_nu);
        }
        s_true = numerical_sparsity(x);
        if (rho < 0.0) rho = sigma0 / (gamma * x.norm());
        sk = acquire_sketch(x, n1, n2, gamma, NoiseSpec::uniform(sigma0), RngStream(seed));
        if (!sketch_out.empty()) {
          auto out = open_out(sketch_out);
          write_sketch_csv(out, sk);
        }
      }
      const auto est = estimate_sparsity(sk, alpha, rho);
      print("p", static_cast<double>(sk.p));
      print("n1", static_cast<double>(sk.n1()));
      print("n2", static_cast<double>(sk.n2()));
      print("l1_hat", est.t1_hat);
      print("l2_hat", est.t2_hat);
      print("s_hat", est.s_hat);
      print("ci_low", est.ci_low);
      print("ci_high", est.ci_high);
      print("coverage_level", (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha));
      if (s_true > 0.0) print("s_true", s_true);
    } else if (*rank) {
      seed = seed_or_env(seed, rank_seed->count() > 0, seed);
      MatrixSketch sk;
      double r_true = 0.0;
      if (!sketch_in.empty()) {
        auto in = open_in(sketch_in);
        sk = read_matrix_sketch_csv(in);
        if (varrho < 0.0) {
          if (sk.sigma0 > 0.0) throw ParameterError("--varrho is required when estimating from a noisy saved sketch");
          varrho = 0.0;
        }
      } else {
        Eigen::MatrixXd X;
        if (!matrix_path.empty()) {
          auto in = open_in(matrix_path);
          X = read_matrix_csv(in);
        } else {
          X = make_projection_matrix(proj_p, proj_rank);
        }
        r_true = effective_rank(X);
        if (varrho < 0.0) varrho = sigma0 / (gamma * X.norm());
        sk = acquire_matrix_sketch(X, n1, n2, gamma, NoiseSpec::uniform(sigma0), RngStream(seed));
        if (!sketch_out.empty()) {
          auto out = open_out(sketch_out);
          write_sketch_csv(out, sk);
        }
      }
      const auto est = estimate_effective_rank(sk, alpha, varrho);
      print("p", static_cast<double>(sk.p));
      print("trace_hat", est.t1_breve);
      print("frobenius_hat", est.t2_breve);
      print("r_hat", est.r_hat);
      print("ci_low", est.ci_low);
      print("ci_high", est.ci_high);
      print("coverage_level", 1.0 - 2.0 * alpha);
      if (r_true > 0.0) print("r_true", r_true);
    } else if (*recover) {
      seed = seed_or_env(seed, rec_seed->count() > 0, seed);
      Signal x;
      if (!signal_path.empty()) {
        auto in = open_in(signal_path);
        x = read_signal_csv(in);
      } else {
        x = make_power_law_signal(est_p, est_nu);
      }
      RecoveryProtocol protocol;
      protocol.n_sketch = n_sketch;
      protocol.alpha = alpha;
      protocol.bp.tol = bp_tol;
      protocol.bp.max_iter = bp_max_iter;
      const RngStream stream(seed);
      const auto outcome = recover_with_estimated_sparsity(x, gamma, rec_sigma0, stream, protocol);
      const fs::path dir = output_dir(out_flag);
      {
        auto out = open_out(dir / "reconstruction.csv");
        write_reconstruction_csv(out, x, outcome.recovery.x_hat);
      }
      {
        auto op = MeasurementOperator::seed_streamed_gaussian(stream.child(streams::kGaussianRows),
                                                               std::max(outcome.n_hat, n_sketch), x.size(), gamma);
        auto out = open_out(dir / "operator.txt");
        write_operator_descriptor(out, OperatorDescriptor::of(op));
      }
      print("s_true", numerical_sparsity(x));
      print("s_hat", outcome.estimate.s_hat);
      print("n_hat", static_cast<double>(outcome.n_hat));
      print("n_extra", static_cast<double>(outcome.n_extra));
      print("eps0", outcome.eps0);
      print("relative_error", outcome.relative_error);
      print("bp_iterations", outcome.recovery.bp_iterations);
      print("converged", outcome.recovery.converged ? "true" : "false");
      print("output", (dir / "reconstruction.csv").string());
    } else if (*experiment) {
      const ExperimentConfig cfg = load_config(exp_name, config_path, sets);
      const fs::path dir = output_dir(out_flag);
      switch (cfg.experiment) {
        case ExperimentKind::RelativeErrorVsN:
        case ExperimentKind::RelativeErrorVsRho:
          write_fig2_outputs(run_fig2(cfg), dir);
          break;
        case ExperimentKind::Reconstruction: {
          const auto result = run_fig3(cfg);
          {
            auto out = open_out(dir / "fig3.csv");
            result.table.write_csv(out);
          }
          for (const auto& ex : result.examples) {
            const std::string stem = "fig3_p=" + std::to_string(ex.x.size()) + "_nu=" + fmt(ex.nu);
            {
              auto out = open_out(dir / (stem + ".csv"));
              write_reconstruction_csv(out, ex.x, ex.x_hat);
            }
            write_svg(dir / (stem + ".svg"), reconstruction_plot(ex));
          }
          break;
        }
        case ExperimentKind::RankCoverage: {
          const auto table = run_rank_coverage(cfg);
          {
            auto out = open_out(dir / "rank-coverage.csv");
            table.write_csv(out);
          }
          PlotSpec spec;
          spec.statistic = "coverage";
          spec.x_param = "n";
          spec.series_params = varying(table, {"p", "varrho"});
          spec.log_y = false;
          auto out = open_out(dir / "rank-coverage.svg");
          emit_svg_plot(out, table, spec);
          break;
        }
        case ExperimentKind::AdversarialDemo: {
          const auto table = run_adversarial_demo(cfg);
          auto out = open_out(dir / "adversarial.csv");
          table.write_csv(out);
          auto wide = open_out(dir / "adversarial_pairs.csv");
          write_adversarial_csv(wide, table);
          break;
        }
      }
      print("output", dir.string());
    } else if (*adversarial) {
      seed = seed_or_env(seed, adv_seed->count() > 0, seed);
      const RngStream stream(seed);
      const Eigen::VectorXd entries = draw_stable_vector(StableKind::Gaussian, 1.0, adv_n * adv_p, stream.child(0));
      const Eigen::MatrixXd A = Eigen::Map<const Eigen::MatrixXd>(entries.data(), adv_n, adv_p);
      Signal x = Signal::Zero(adv_p);
      x[0] = 1.0;
      const auto pair = dense_null_perturbation(A, x, stream.child(1), retries);
      const fs::path dir = output_dir(out_flag);
      {
        auto out = open_out(dir / "adversarial_pair.csv");
        out << "index,x,x_tilde\n";
        for (Eigen::Index i = 0; i < adv_p; ++i) {
          out << i << ',' << format_double(pair.x_base[i]) << ',' << format_double(pair.x_tilde[i]) << '\n';
        }
      }
      print("p", static_cast<double>(adv_p));
      print("n", static_cast<double>(adv_n));
      print("bound", pair.bound);
      print("attained_s", pair.attained_s);
      print("s_base", pair.base_s);
      print("retries", static_cast<double>(pair.retries));
      print("residual_norm", (A * (pair.x_tilde - pair.x_base)).norm());
      print("minimax_lower_bound", minimax_lower_bound(adv_p, adv_n));
      print("output", (dir / "adversarial_pair.csv").string());
    }
  } catch (const std::exception& e) {
    std::cerr << "sparsest: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
