// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include "felod/correctors.hpp"

using namespace felod;

namespace {

const Omega1Region omega1{{Rect{0.25, 0.375, 0.25, 0.375}}};
const CoefficientField field = AnalyticPeriodic{PeriodicFormula::Oscillating, 0.2};

Execution mode(const benchmark::State& state) {
  return state.range(1) ? Execution::Parallel : Execution::Serial;
}

void BM_LocalForms(benchmark::State& state) {
  const int nf = static_cast<int>(state.range(0));
  const DomainPartition p = partition_domain(Domain::UnitSquare, omega1, 8, nf);
  const Discretization d = discretize(p, field, 10.0, Execution::Serial);
  for (auto _ : state) {
    LocalForms forms = compute_local_forms(p, d.coeffs, d.fine, d.penalty, mode(state));
    benchmark::DoNotOptimize(forms);
  }
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

void BM_MultiscaleBasis(benchmark::State& state) {
  const int nf = static_cast<int>(state.range(0));
  const DomainPartition p = partition_domain(Domain::UnitSquare, omega1, 8, nf);
  const Discretization d = discretize(p, field, 10.0, Execution::Serial);
  for (auto _ : state) {
    MultiscaleBasis basis = build_multiscale_basis(d, 2, mode(state));
    benchmark::DoNotOptimize(basis);
  }
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_LocalForms)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiscaleBasis)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
