#include <benchmark/benchmark.h>

#include <random>

#include "georelay/coding.hpp"
#include "georelay/downlink.hpp"
#include "georelay/galois.hpp"
#include "georelay/lp.hpp"
#include "georelay/scenario.hpp"
#include "georelay/uplink.hpp"
#include "georelay/waterfill.hpp"

using namespace georelay;

namespace {

Scenario defaults() { return parse_scenario("{}"); }

}  // namespace

// Single-LEOS downlink window at grid step 1 s, 0.5 s and 0.25 s.
static void BM_Waterfill(benchmark::State& state) {
  Scenario s = defaults();
  s.solver.dt_s = 1.0 / static_cast<double>(state.range(0));
  const DownlinkRequest req = build_downlink_request(s);
  const auto channels = downlink_channels(req, req.horizon_s);
  const Channel& ch = channels[2];
  const double target = req.alpha * req.file_bits;
  for (auto _ : state) benchmark::DoNotOptimize(constrained_waterfill(ch, target, req.pmax_w).energy_j);
  state.counters["cells"] = static_cast<double>(ch.size());
}
BENCHMARK(BM_Waterfill)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

// Full uplink energy minimization; the short horizon forces master iterations.
static void BM_OuterApproximation(benchmark::State& state) {
  const UplinkRequest req = build_uplink_request(defaults());
  const double horizon = state.range(0) == 0 ? req.horizon_s : min_time_uplink(req).t0_s;
  const FileAllocationProblem p = uplink_problem(req, horizon);
  int iterations = 0;
  for (auto _ : state) {
    const OAResult r = oa_min_energy(p);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.allocation.total_energy_j);
  }
  state.counters["oa_iterations"] = iterations;
}
BENCHMARK(BM_OuterApproximation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_DpOracle(benchmark::State& state) {
  const FileAllocationProblem p = uplink_problem(build_uplink_request(defaults()));
  for (auto _ : state) benchmark::DoNotOptimize(dp_oracle(p).energy_j);
}
BENCHMARK(BM_DpOracle)->Unit(benchmark::kMillisecond);

// Random dense LPs with box bounds: min c x, A x <= b.
static void BM_Simplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  lp::LinearProgram prog;
  for (std::size_t j = 0; j < n; ++j) prog.add_variable(-u(rng), 0.0, 10.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (double& a : row) a = u(rng);
    prog.add_row(std::move(row), lp::Sense::kLessEqual, 1.0 + u(rng) * n);
  }
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve_lp(prog).objective);
}
BENCHMARK(BM_Simplex)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);

static void BM_Gf256Rank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FiniteField f = FiniteField::gf256();
  std::mt19937_64 rng(11);
  FieldMatrix m(n, n);
  for (Symbol& x : m.data()) x = static_cast<Symbol>(rng() % 256);
  for (auto _ : state) benchmark::DoNotOptimize(rank(f, m));
}
BENCHMARK(BM_Gf256Rank)->Arg(30)->Arg(120)->Unit(benchmark::kMicrosecond);

static void BM_EncodeDefault(benchmark::State& state) {
  const RegenParams p = RegenParams::standard();
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(encode(p, FiniteField::gf256(), seed++).attempts);
}
BENCHMARK(BM_EncodeDefault)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
