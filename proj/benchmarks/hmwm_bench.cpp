// Microbenchmarks for the costs that matter operationally: designing a bank
// is a one-off, but the per-step filter work sits inside the control loop and
// the attack solvers bound how much offline compute an eavesdropper needs.

#include <benchmark/benchmark.h>

#include "hmwm/adversary.hpp"
#include "hmwm/scenario.hpp"
#include "hmwm/serialization.hpp"

using namespace hmwm;

namespace {

const ScenarioConfig& shipped_config() {
  static const ScenarioConfig cfg =
      scenario_from_json(read_text_file(BENCH_CONFIG_DIR "/tank_scenario.json"));
  return cfg;
}

const DesignResult& shipped_design() {
  static const DesignResult res = [] {
    RandomSource rng(shipped_config().design_seed);
    return design_bank(shipped_config().design, rng);
  }();
  return res;
}

const SimTrace& shipped_trace() {
  static const SimTrace trace = [] {
    ScenarioConfig cfg = shipped_config();
    cfg.steps = 1000;
    return run_scenario(cfg).trace;
  }();
  return trace;
}

RegressorSet shipped_regressors(int lag) {
  const SimTrace& trace = shipped_trace();
  AttackDataset data;
  data.y_w = trace.y_w;
  data.u = trace.u;
  data.labels.assign(trace.mode_w.data(), trace.mode_w.data() + trace.steps());
  return build_regressors(data, lag);
}

void BM_DesignBank(benchmark::State& state) {
  const DesignSpec spec = shipped_config().design;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    RandomSource rng(seed++);
    benchmark::DoNotOptimize(design_bank(spec, rng));
  }
}
BENCHMARK(BM_DesignBank)->Unit(benchmark::kMillisecond);

void BM_CertifyBank(benchmark::State& state) {
  const WatermarkBank& bank = shipped_design().bank;
  for (auto _ : state) benchmark::DoNotOptimize(certify_guas(bank));
}
BENCHMARK(BM_CertifyBank)->Unit(benchmark::kMicrosecond);

void BM_FilterStepPair(benchmark::State& state) {
  const WatermarkBank& bank = shipped_design().bank;
  FilterState gen{Vector::Zero(bank.n_w), 1};
  FilterState rem{Vector::Zero(bank.n_w), 1};
  RandomSource rng(3);
  Vector y(bank.p);
  for (auto _ : state) {
    for (int i = 0; i < bank.p; ++i) y(i) = rng.next_gaussian();
    const FilterOutput w = generator_step(bank, gen, y);
    benchmark::DoNotOptimize(remover_step(bank, rem, w.y));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FilterStepPair);

void BM_Classify(benchmark::State& state) {
  const Partition& part = shipped_design().bank.partition;
  RandomSource rng(5);
  Vector x(part.dim);
  for (auto _ : state) {
    for (int i = 0; i < part.dim; ++i) x(i) = rng.next_gaussian();
    benchmark::DoNotOptimize(classify(part, x));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Classify);

void BM_ClosedLoopRun(benchmark::State& state) {
  ScenarioConfig cfg = shipped_config();
  cfg.steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.steps);
}
BENCHMARK(BM_ClosedLoopRun)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KmeansAttack(benchmark::State& state) {
  const RegressorSet reg = shipped_regressors(1);
  for (auto _ : state) {
    RandomSource rng(7);
    benchmark::DoNotOptimize(kmeans_attack(reg, 6, 1, rng));
  }
}
BENCHMARK(BM_KmeansAttack)->Unit(benchmark::kMillisecond);

void BM_KlinregAttack(benchmark::State& state) {
  const RegressorSet reg = shipped_regressors(1);
  for (auto _ : state) {
    RandomSource rng(7);
    benchmark::DoNotOptimize(klinreg_attack(reg, 6, 1, rng));
  }
}
BENCHMARK(BM_KlinregAttack)->Unit(benchmark::kMillisecond);

void BM_SampleBound(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(io_complexity(6, static_cast<int>(state.range(0)), 2, 2));
}
BENCHMARK(BM_SampleBound)->Arg(5)->Arg(15);

}  // namespace

BENCHMARK_MAIN();
