#include <benchmark/benchmark.h>

#include "ssperk/analysis.hpp"
#include "ssperk/catalog.hpp"
#include "ssperk/integrator.hpp"
#include "ssperk/problems.hpp"

using namespace ssperk;
using Eigen::VectorXd;

namespace {

const char* const kMethods[] = {"ssp2,2-b2", "ssp9,3", "ssp10,4-b3", "dp54"};

void BM_RkStepAdvection(benchmark::State& state) {
  const auto tab = resolve_method(kMethods[state.range(0)]);
  const auto sys = make_advection(200);
  VectorXd next(sys.dim());
  VectorXd hat(sys.dim());
  StepWorkspace ws;
  for (auto _ : state) {
    rk_step(tab, sys.rhs, 0.0, sys.u0, 1e-3, next, hat, ws);
    benchmark::DoNotOptimize(next.data());
  }
  state.SetLabel(tab.id);
  state.SetItemsProcessed(state.iterations() * tab.stages);
}
BENCHMARK(BM_RkStepAdvection)->DenseRange(0, 3);

void BM_WenoAdvectionRhs(benchmark::State& state) {
  const auto sys = make_advection(static_cast<int>(state.range(0)));
  VectorXd du(sys.dim());
  for (auto _ : state) {
    sys.rhs(0.0, sys.u0, du);
    benchmark::DoNotOptimize(du.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WenoAdvectionRhs)->RangeMultiplier(4)->Range(64, 4096);

void BM_EulerRhs(benchmark::State& state) {
  const auto sys = make_euler_sod(static_cast<int>(state.range(0)));
  VectorXd dq(sys.dim());
  for (auto _ : state) {
    sys.rhs(0.0, sys.u0, dq);
    benchmark::DoNotOptimize(dq.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerRhs)->RangeMultiplier(4)->Range(64, 4096);

void BM_SspCoefficient(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto t = base_method(parse_method_id("ssp" + std::to_string(n * n) + ",3"));
  for (auto _ : state) benchmark::DoNotOptimize(ssp_coefficient(t.A, t.b));
}
BENCHMARK(BM_SspCoefficient)->DenseRange(2, 6);

void BM_StabilityRadii(benchmark::State& state) {
  const auto t = resolve_method("ssp10,4-b3");
  const auto psi = stability_polynomial(t.A, t.b);
  for (auto _ : state) benchmark::DoNotOptimize(stability_radii(psi, 100.0));
}
BENCHMARK(BM_StabilityRadii);

void BM_AdaptiveVdp(benchmark::State& state) {
  const auto sys = make_vdp_scaled();
  const auto tab = resolve_method("ssp2,2-b2");
  AdaptiveOptions opt;
  opt.record_log = false;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_adaptive(sys, tab, opt).n_fev);
}
BENCHMARK(BM_AdaptiveVdp);

}  // namespace
BENCHMARK_MAIN();
