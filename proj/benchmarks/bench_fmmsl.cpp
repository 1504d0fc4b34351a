#include <benchmark/benchmark.h>

#include "fmmsl/em.hpp"
#include "fmmsl/inference.hpp"
#include "fmmsl/sim_study.hpp"

namespace {

fmmsl::MixtureParams design() {
  const fmmsl::Matrix s = 1.5 * fmmsl::Matrix::Identity(2, 2);
  fmmsl::Vector w(2), a(2), b(2);
  w << 0.6, 0.4;
  a << 2.0, 2.0;
  b << -2.0, -2.0;
  return fmmsl::MixtureParams(w, {fmmsl::MslParams(a, s, a / 2.0), fmmsl::MslParams(b, s, b / 2.0)});
}

fmmsl::DataMatrix sample(benchmark::State& state) {
  return fmmsl::simulate_mixture(design(), static_cast<std::size_t>(state.range(0)), 7).data;
}

void BM_LogpdfRows(benchmark::State& state) {
  const fmmsl::DataMatrix y = sample(state);
  const fmmsl::MixtureParams theta = design();
  const fmmsl::MslParams& c = theta.component(0);
  for (auto _ : state) benchmark::DoNotOptimize(fmmsl::msl_logpdf_rows(y, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EStep(benchmark::State& state) {
  const fmmsl::DataMatrix y = sample(state);
  const fmmsl::MixtureParams theta = design();
  for (auto _ : state) benchmark::DoNotOptimize(fmmsl::e_step(y, theta));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Fit(benchmark::State& state) {
  const fmmsl::DataMatrix y = sample(state);
  fmmsl::EmConfig cfg;
  cfg.compute_se = false;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fmmsl::fit(y, cfg));
}

void BM_EmpiricalInfo(benchmark::State& state) {
  const fmmsl::DataMatrix y = sample(state);
  const fmmsl::MixtureParams theta = design();
  for (auto _ : state) benchmark::DoNotOptimize(fmmsl::empirical_info(y, theta));
}

}  // namespace

BENCHMARK(BM_LogpdfRows)->Arg(500)->Arg(2000)->Arg(20000);
BENCHMARK(BM_EStep)->Arg(500)->Arg(2000)->Arg(20000);
BENCHMARK(BM_Fit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalInfo)->Arg(500)->Arg(2000);
BENCHMARK_MAIN();
