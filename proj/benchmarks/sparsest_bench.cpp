#include <cmath>

#include <benchmark/benchmark.h>

#include "sparsest/basis_pursuit.hpp"
#include "sparsest/experiments.hpp"
#include "sparsest/operator.hpp"
#include "sparsest/rank_sketch.hpp"
#include "sparsest/sketch.hpp"
#include "sparsest/stable.hpp"

using namespace sparsest;

static void BM_StableDraws(benchmark::State& state) {
  const auto kind = state.range(1) == 1 ? StableKind::Cauchy : StableKind::Gaussian;
  Eigen::VectorXd buf(state.range(0));
  auto engine = RngStream(1).engine();
  for (auto _ : state) {
    fill_stable(kind, 1.0, std::span<double>(buf.data(), static_cast<std::size_t>(buf.size())), engine);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StableDraws)->Args({10000, 1})->Args({10000, 2});

static void BM_AcquireSketch(benchmark::State& state) {
  const Signal x = make_power_law_signal(state.range(0), 1.0);
  std::uint64_t t = 0;
  for (auto _ : state) {
    auto sk = acquire_sketch(x, 500, 500, 1.0, NoiseSpec::uniform(1e-2), RngStream(2).child(t++));
    benchmark::DoNotOptimize(sk.y_gauss.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000 * state.range(0));
}
BENCHMARK(BM_AcquireSketch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_EstimateSparsity(benchmark::State& state) {
  const auto sk = acquire_sketch(make_power_law_signal(1000, 1.0), state.range(0), state.range(0), 1.0,
                                 NoiseSpec::none(), RngStream(3));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_sparsity(sk, 0.05, 0.0).s_hat);
}
BENCHMARK(BM_EstimateSparsity)->Arg(500)->Arg(50000);

static void BM_MatrixProbe(benchmark::State& state) {
  const Eigen::MatrixXd X = make_projection_matrix(state.range(0), 10);
  std::int64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_matrix_probe(X, RngStream(4), i++, 1.0));
}
BENCHMARK(BM_MatrixProbe)->Arg(100)->Arg(400);

static void BM_ApplyStreamed(benchmark::State& state) {
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(5), 500, state.range(0), 1.0);
  const Eigen::VectorXd v = make_power_law_signal(state.range(0), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(v).data());
}
BENCHMARK(BM_ApplyStreamed)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ApplyDense(benchmark::State& state) {
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(5), 500, state.range(0), 1.0).materialize();
  const Eigen::VectorXd v = make_power_law_signal(state.range(0), 1.0);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.apply(v).data());
    benchmark::DoNotOptimize(op.apply_transpose(w).data());
  }
}
BENCHMARK(BM_ApplyDense)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_BasisPursuit(benchmark::State& state) {
  const Eigen::Index p = state.range(0);
  const double nu = static_cast<double>(state.range(1)) / 10.0;
  const Eigen::Index n = p / 2;
  const auto op = MeasurementOperator::seed_streamed_gaussian(RngStream(6), n, p, 1.0).materialize();
  const Signal x = make_power_law_signal(p, nu);
  const Eigen::VectorXd y = op.apply(x);
  const double eps = 1e-3 * std::sqrt(static_cast<double>(n));
  int iterations = 0;
  for (auto _ : state) {
    const auto res = basis_pursuit(op, y, eps);
    iterations = res.bp_iterations;
    benchmark::DoNotOptimize(res.x_hat.data());
  }
  state.counters["bp_iterations"] = iterations;
}
BENCHMARK(BM_BasisPursuit)->Args({1000, 13})->Args({1000, 10})->Args({1000, 7})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
