#include <benchmark/benchmark.h>

#include "walklab/bsm.hpp"
#include "walklab/conjugate.hpp"
#include "walklab/counterexample.hpp"
#include "walklab/dp.hpp"
#include "walklab/esscher.hpp"
#include "walklab/numerics.hpp"
#include "walklab/prop1b.hpp"
#include "walklab/rv_lattice.hpp"

using namespace walklab;

static void BM_TerminalDistribution(benchmark::State& state) {
  const auto rv = FiniteRV::trinomial();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(terminal_distribution(rv, n).size());
  state.SetComplexityN(n);
}
BENCHMARK(BM_TerminalDistribution)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_SolveEsscher(benchmark::State& state) {
  const auto rv = FiniteRV::asymmetric_binomial();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_esscher(rv, n).a);
}
BENCHMARK(BM_SolveEsscher)->Arg(16)->Arg(4096)->Arg(1 << 20);

static void BM_CrraDp(benchmark::State& state) {
  const auto rv = FiniteRV::symmetric_binomial();
  for (auto _ : state) {
    benchmark::DoNotOptimize(crra_dp(rv, static_cast<int>(state.range(0)), 1.0 / 3.0).value_at(1.0));
  }
}
BENCHMARK(BM_CrraDp)->Arg(16)->Arg(256);

static void BM_GeneralDp(benchmark::State& state) {
  const auto rv = FiniteRV::trinomial();
  const auto u = UtilitySpec::crra(1.0 / 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(general_dp(rv, static_cast<int>(state.range(0)), u).value_at(1.0));
  }
}
BENCHMARK(BM_GeneralDp)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_VBsmQuadrature(benchmark::State& state) {
  const auto v = UtilitySpec::power_conjugate(1.0, 1.0);
  const int order = static_cast<int>(state.range(0));
  gauss_hermite_rule(order);
  for (auto _ : state) benchmark::DoNotOptimize(v_bsm(v, 1.0, order, false));
}
BENCHMARK(BM_VBsmQuadrature)->Arg(50)->Arg(200)->Arg(400);

static void BM_Certificate(benchmark::State& state) {
  const auto rv = FiniteRV::asymmetric_binomial();
  const auto grid = linear_grid(0.1, 1.0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(build_certificate(rv, grid, 5).lambda0);
}
BENCHMARK(BM_Certificate)->Unit(benchmark::kMillisecond);

static void BM_DivergenceScan(benchmark::State& state) {
  const auto eps = default_epsilons();
  for (auto _ : state) benchmark::DoNotOptimize(divergence_scan(0.75, 0.1, eps).slope);
}
BENCHMARK(BM_DivergenceScan)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
