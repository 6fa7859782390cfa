#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "uplift/ols.hpp"
#include "uplift/rng.hpp"
#include "uplift/student_t.hpp"
#include "uplift/synth.hpp"
#include "uplift/two_step.hpp"

namespace {

using namespace uplift;

DesignMatrix random_design(std::size_t n, std::size_t p, Xoshiro256& rng) {
  Matrix m(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) m(i, j) = standard_normal(rng);
  }
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < p; ++j) labels.push_back("x" + std::to_string(j));
  return DesignMatrix(std::move(m), std::move(labels));
}

void BM_FitOls(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::size_t>(state.range(1));
  Xoshiro256 rng(1);
  const auto X = random_design(n, p, rng);
  std::vector<double> y(n);
  for (auto& v : y) v = standard_normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_ols(X, y));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FitOls)->Args({200, 9})->Args({2000, 10})->Args({20000, 10});

void BM_TPvalue(benchmark::State& state) {
  const long dof = state.range(0);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t_pvalue(t, dof));
    t = t > 30.0 ? 0.1 : t * 1.1;
  }
}
BENCHMARK(BM_TPvalue)->Arg(5)->Arg(50)->Arg(2000);

void BM_EstimatePanel(benchmark::State& state) {
  DgpConfig cfg;
  cfg.n_days = static_cast<int>(state.range(0));
  const auto panel = generate_panel(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_panel(panel));
}
BENCHMARK(BM_EstimatePanel)->Arg(400)->Arg(2000);

void BM_RunStudy(benchmark::State& state) {
  DgpConfig cfg;
  cfg.n_days = 400;
  std::vector<SkuPanel> panels;
  for (int k = 1; k <= state.range(0); ++k) panels.push_back(generate_panel(cfg, k));
  StudyOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_study(panels, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunStudy)->Args({1000, 1})->Args({1000, 4})->Unit(benchmark::kMillisecond);

void BM_GeneratePanel(benchmark::State& state) {
  DgpConfig cfg;
  cfg.n_days = static_cast<int>(state.range(0));
  std::int64_t sku = 1;
  for (auto _ : state) benchmark::DoNotOptimize(generate_panel(cfg, sku++));
}
BENCHMARK(BM_GeneratePanel)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
