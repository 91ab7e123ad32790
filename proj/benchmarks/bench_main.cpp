#include <aes/agent.hpp>
#include <aes/omd.hpp>
#include <aes/simplex.hpp>
#include <aes/softmdp.hpp>
#include <aes/verify.hpp>
#include <benchmark/benchmark.h>

#include <random>

using namespace aes;

static void BM_MirrorStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  OmdState st{SimplexVec::uniform(k), 0.0, 0};
  std::vector<double> g(k);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : g) v = u(rng);
  for (auto _ : state) {
    st = md_step(st, regularized_grad(g, st.x, 0.1), 0.1, 1e-6);
    benchmark::DoNotOptimize(st.x.probs().data());
  }
}
BENCHMARK(BM_MirrorStep)->Arg(4)->Arg(16)->Arg(256);

static void BM_SolveSoftQ(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto m = random_mdp(static_cast<std::size_t>(state.range(0)), 3, 0.9, 0.2, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_soft_q(m, 1e-8));
}
BENCHMARK(BM_SolveSoftQ)->Arg(5)->Arg(50);

static void BM_SoftReturn(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto m = random_mdp(static_cast<std::size_t>(state.range(0)), 3, 0.9, 0.2, 1.0, rng);
  const auto pi = soft_policy(solve_soft_q(m, 1e-8), m.mu);
  for (auto _ : state) benchmark::DoNotOptimize(soft_return(m, pi));
}
BENCHMARK(BM_SoftReturn)->Arg(5)->Arg(50);

static void BM_TdTrain(benchmark::State& state) {
  std::mt19937_64 rng(4);
  SoftMdpSequence seq;
  seq.base = random_mdp(5, 3, 0.9, 0.2, 1.0, rng);
  seq.pattern = DriftPattern::Abrupt;
  seq.horizon = 3000;
  seq.drift.change_times = {1000, 2000};
  for (auto _ : state) benchmark::DoNotOptimize(td_train(seq, ScheduleConfig{}, TdOptions{}, 0));
}
BENCHMARK(BM_TdTrain)->Unit(benchmark::kMillisecond);

static void BM_PlannerRun(benchmark::State& state) {
  std::mt19937_64 rng(5);
  SoftMdpSequence seq;
  seq.base = random_mdp(5, 3, 0.9, 0.2, 1.0, rng);
  seq.pattern = DriftPattern::Abrupt;
  seq.horizon = 600;
  seq.drift.change_times = {200, 400};
  for (auto _ : state) benchmark::DoNotOptimize(run_planner(seq, ScheduleConfig{}, 1e-6));
}
BENCHMARK(BM_PlannerRun)->Unit(benchmark::kMillisecond);

static void BM_RegretChecks(benchmark::State& state) {
  SuiteOptions opts;
  opts.oco_streams = 10;
  for (auto _ : state) benchmark::DoNotOptimize(regret_checks(0, opts));
}
BENCHMARK(BM_RegretChecks)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
