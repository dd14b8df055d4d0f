#include <benchmark/benchmark.h>

#include <random>

#include "ott/milp/bb.hpp"
#include "ott/milp/kernels.hpp"
#include "ott/mcheck.hpp"
#include "ott/solver_driver.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace ott;

namespace {

Matrix random_tableau(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix t(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t(r, c) = u(rng);
  return t;
}

template <auto Pivot>
void bm_pivot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix base = random_tableau(n, 2 * n);
  std::vector<std::size_t> nz;
  for (auto _ : state) {
    state.PauseTiming();
    Matrix t = base;
    state.ResumeTiming();
    Pivot(t, n / 2, n / 3, nz);
    benchmark::DoNotOptimize(t.data());
  }
}
BENCHMARK(bm_pivot<milp::kernels::pivot_serial>)->Name("pivot/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_pivot<milp::kernels::pivot_parallel>)->Name("pivot/parallel")->Arg(64)->Arg(256)->Arg(1024);

milp::MilpModel brute_model(std::size_t binaries) {
  std::mt19937_64 rng(11);
  return ott::testing::random_milp(rng, binaries, 4, 8 + binaries / 2);
}

void bm_brute_serial(benchmark::State& state) {
  const auto m = brute_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(milp::brute_force_binary_serial(m));
}
void bm_brute_parallel(benchmark::State& state) {
  const auto m = brute_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(milp::brute_force_binary(m));
}
BENCHMARK(bm_brute_serial)->Name("brute_force/serial")->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_brute_parallel)->Name("brute_force/parallel")->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

// Every branch that differs between z0 and zT in one batch: the largest
// variant set the five-bus example offers.
struct RhoFixture {
  Scenario sc = ott::testing::five_bus_scenario();
  std::vector<mcheck::RhoScenario> scenarios;
  RhoFixture() {
    mcheck::RhoScenario s;
    s.id = "one_batch";
    s.grid = &sc.grid;
    s.trajectory.topologies = {sc.z0, *sc.zT};
    s.pg = dispatch_at(sc.grid, *sc.zT);
    scenarios.push_back(std::move(s));
  }
};

void bm_rho_serial(benchmark::State& state) {
  const RhoFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(mcheck::rho_probability_serial(f.scenarios));
}
void bm_rho_parallel(benchmark::State& state) {
  const RhoFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(mcheck::rho_probability(f.scenarios));
}
BENCHMARK(bm_rho_serial)->Name("rho/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(bm_rho_parallel)->Name("rho/parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
