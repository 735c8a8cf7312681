#include <benchmark/benchmark.h>

#include "sdosm/analysis.hpp"
#include "sdosm/ddm.hpp"
#include "sdosm/timeloop.hpp"

using namespace sdosm;

namespace {

DiscretizationParams periodic_disc(double h) {
  DiscretizationParams d;
  d.theta = 0.5;
  d.dt = 0.01;
  d.h = h;
  return d;
}

void BM_SymbolRho(benchmark::State& state) {
  const PhysicalParams p = analysis::test_case_params(TestCase::B);
  const DiscretizationParams d = periodic_disc(1.0 / 32.0);
  double k = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::rho(k, 3.0, p, d));
    k = k < 200.0 ? k * 1.01 : 1.0;
  }
}
BENCHMARK(BM_SymbolRho);

void BM_MinMaxTheorem(benchmark::State& state) {
  const PhysicalParams p = analysis::test_case_params(TestCase::B);
  const DiscretizationParams d = periodic_disc(1.0 / 32.0);
  const FrequencyBand band = FrequencyBand::from_discretization(d, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::solve_minmax_theorem(p, d, band).s_star);
}
BENCHMARK(BM_MinMaxTheorem);

void BM_MinMaxNumeric(benchmark::State& state) {
  const PhysicalParams p = analysis::test_case_params(TestCase::B);
  const DiscretizationParams d = periodic_disc(1.0 / 32.0);
  const FrequencyBand band = FrequencyBand::from_discretization(d, 2.0, true, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::solve_minmax_numeric(p, d, band).s_star);
}
BENCHMARK(BM_MinMaxNumeric)->Unit(benchmark::kMillisecond);

// One manufactured-solution step with factorized subdomain systems.
struct Fixture {
  timeloop::Scenario sc = timeloop::make_manufactured_scenario(TestCase::A);
  mesh::CoupledMesh m;
  DiscretizationParams d;
  RobinPair robin;
  fem::DofMap dofs;
  fem::StokesOperators sops;
  fem::DarcyOperators dops;
  std::unique_ptr<fem::StokesSystem> stokes;
  std::unique_ptr<fem::DarcySystem> darcy;
  std::unique_ptr<ddm::InterfaceProblem> prob;

  explicit Fixture(int level) {
    m = sc.build_mesh({level, 0});
    d = sc.discretization(m, 0.01);
    robin = sc.optimize(d).robin;
    dofs = fem::build_dofmap(m, sc.params.no_slip_interface());
    sops = fem::assemble_stokes_operators(m, dofs, sc.params);
    dops = fem::assemble_darcy_operators(m, dofs, sc.params);
    stokes = std::make_unique<fem::StokesSystem>(sops, dofs, d, robin);
    darcy = std::make_unique<fem::DarcySystem>(dops, dofs, sc.params, d, robin);
    prob = std::make_unique<ddm::InterfaceProblem>(*stokes, *darcy, robin);
  }
};

void BM_StokesFactorize(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fem::StokesSystem(f.sops, f.dofs, f.d, f.robin).size());
  state.counters["dofs"] = f.stokes->size();
}
BENCHMARK(BM_StokesFactorize)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_StokesSolve(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const fem::Vector rhs = fem::Vector::Ones(f.stokes->size());
  const fem::Vector lambda = fem::Vector::Ones(f.prob->size());
  for (auto _ : state) benchmark::DoNotOptimize(f.stokes->solve(rhs, fem::Vector(), lambda).data());
  state.counters["dofs"] = f.stokes->size();
}
BENCHMARK(BM_StokesSolve)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_DarcySolve(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const fem::Vector rhs = fem::Vector::Ones(f.darcy->size());
  const fem::Vector lambda = fem::Vector::Ones(f.prob->size());
  for (auto _ : state) benchmark::DoNotOptimize(f.darcy->solve(rhs, fem::Vector(), lambda).data());
  state.counters["dofs"] = f.darcy->size();
}
BENCHMARK(BM_DarcySolve)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_InterfaceApply(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const fem::Vector x = timeloop::random_interface_state(f.prob->size(), 1).stacked();
  for (auto _ : state) benchmark::DoNotOptimize(f.prob->apply(x).data());
  state.counters["interface"] = 2 * f.prob->size();
}
BENCHMARK(BM_InterfaceApply)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
