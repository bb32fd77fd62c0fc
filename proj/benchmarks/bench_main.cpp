#include <string>

#include <benchmark/benchmark.h>

#include "tsl/charfun.hpp"
#include "tsl/model.hpp"
#include "tsl/solutions.hpp"
#include "tsl/spectrum.hpp"

namespace {

tsl::ProblemSpec load(const char* name) {
  return tsl::load_problem(std::string(TSL_PROBLEMS_DIR) + "/" + name);
}

void BM_Charfun(benchmark::State& state) {
  const tsl::ProblemSpec p = load("coupled_potential.json");
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tsl::charfun<double>(p, lambda));
}
BENCHMARK(BM_Charfun)->Arg(1)->Arg(100)->Arg(10000);

void BM_CharfunComplex(benchmark::State& state) {
  const tsl::ProblemSpec p = load("coupled_potential.json");
  const tsl::Complex lambda(static_cast<double>(state.range(0)), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(tsl::charfun<tsl::Complex>(p, lambda));
}
BENCHMARK(BM_CharfunComplex)->Arg(1)->Arg(100);

void BM_Picard(benchmark::State& state) {
  const tsl::ProblemSpec p = load("coupled_potential.json");
  for (auto _ : state) benchmark::DoNotOptimize(tsl::picard_phi2<double>(p, -10.0));
}
BENCHMARK(BM_Picard);

void BM_Eigenvalues(benchmark::State& state) {
  const tsl::ProblemSpec p = load("p2.json");
  tsl::SpectrumOptions opts;
  opts.with_eigenfunctions = false;
  for (auto _ : state) benchmark::DoNotOptimize(tsl::compute_spectrum(p, static_cast<int>(state.range(0)), opts));
}
BENCHMARK(BM_Eigenvalues)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
