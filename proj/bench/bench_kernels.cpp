#include <benchmark/benchmark.h>

#include "shellcir/coupled_channel.hpp"
#include "shellcir/multipole.hpp"

using namespace shellcir;

namespace {

Truncation bench_truncation(int n) {
  Truncation t;
  t.n_rel_max = n;
  t.n_com_max = n;
  t.l_max = 2;
  t.k_max = 4;
  t.rel_grid = GridSpec{12.0, 12, 8, 3};
  t.com_grid = GridSpec{0.0, 10, 8, 0};
  return t;
}

struct Setup {
  CoupledChannelSolver solver;
  ProductBasis basis;
  MultipoleTable multipoles;

  explicit Setup(int n)
      : solver([] {
          ModelParams p;
          p.scattering = ScatteringLength::from_length(0.53);
          return p;
        }(),
               bench_truncation(n), 2.0),
        basis(solver.basis(1.5)),
        multipoles(solver.multipoles(1.5)) {}
};

void BM_AssembleReference(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_reference(s.basis, s.multipoles, s.solver.angular()));
  state.counters["dim"] = s.basis.dimension();
}

void BM_Assemble(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(s.basis, s.multipoles, s.solver.angular()));
  state.counters["dim"] = s.basis.dimension();
}

void BM_Multipoles(benchmark::State& state) {
  const Setup s(4);
  const auto& r = s.solver.rel_grid().points();
  const auto& R = s.solver.com_grid().points();
  for (auto _ : state) benchmark::DoNotOptimize(multipole_decompose(1.5, r, R, static_cast<int>(state.range(0))));
}

void BM_Solve(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.solver.solve(1.5, 14));
  state.counters["dim"] = s.basis.dimension();
}

}  // namespace

BENCHMARK(BM_AssembleReference)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble)->Arg(6)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Multipoles)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
