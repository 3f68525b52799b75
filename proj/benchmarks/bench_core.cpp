#include <benchmark/benchmark.h>

#include "nakao/iteration.hpp"
#include "nakao/solver.hpp"
#include "nakao/testfn.hpp"

using namespace nakao;

namespace {

void BM_PhiQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto v = testfn::phi(n, 10.0);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_PhiQuadrature)->Arg(2)->Arg(3)->Arg(4);

void BM_PhiBallIntegral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto v = testfn::phi_ball_integral(n, 20.0);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_PhiBallIntegral)->Arg(1)->Arg(2)->Arg(3);

void BM_RecursionTo41(benchmark::State& state) {
  const ProblemParams pp{2.0, 2.0, 1, 1.0, 0.5};
  iteration::DataIntegrals data{1.0, 1.0, 2.0};
  const auto c = iteration::constants_ledger(pp, 2.0, data);
  for (auto _ : state) {
    auto s = iteration::first_terms(pp, c);
    for (int j = 1; j < 41; ++j) s = iteration::recursion_step(s, pp, c);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_RecursionTo41);

void BM_ConstantsLedger(benchmark::State& state) {
  const ProblemParams pp{2.0, 2.0, 1, 1.0, 0.5};
  iteration::DataIntegrals data{1.0, 1.0, 2.0};
  for (auto _ : state) {
    auto c = iteration::constants_ledger(pp, 2.0, data);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_ConstantsLedger);

void BM_SolverStep(benchmark::State& state) {
  solver::SimConfig cfg;
  cfg.params = ProblemParams{2.0, 2.0, 1, 1.0, 0.3};
  cfg.nx = static_cast<int>(state.range(0));
  cfg.t_max = 10.0;
  solver::Stepper stepper(cfg);
  auto s = solver::init_bump(cfg);
  const double dt = stepper.base_dt();
  for (auto _ : state) {
    stepper.advance(s, dt);
    benchmark::DoNotOptimize(s.vt.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolverStep)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

}  // namespace

BENCHMARK_MAIN();
