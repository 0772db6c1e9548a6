#include <benchmark/benchmark.h>

#include "annewton/acceptance.hpp"
#include "annewton/gossip.hpp"
#include "annewton/simulator.hpp"

using namespace annewton;

namespace {

template <class S>
void BM_Step(benchmark::State& state) {
  RunOptions opt;
  opt.timestamps = false;
  auto w = make_world(fig1_objective<S>(), 0.8, 1, opt);
  for (auto _ : state) benchmark::DoNotOptimize(step(w));
}
BENCHMARK(BM_Step<double>);
BENCHMARK(BM_Step<HighPrecision>);

void BM_StepRandomGraph(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<LocalSpec> specs;
  for (std::size_t i = 0; i < n; ++i) specs.push_back(LocalSpec::quadratic(1.0, static_cast<double>(i)));
  auto obj = std::make_shared<const PenalizedObjective<double>>(
      make_objective<double>(metropolis_weights(Graph::erdos_renyi(n, 0.2, 7)), 1.0, specs));
  RunOptions opt;
  opt.policy = StepsizePolicy::Unchecked;
  opt.timestamps = false;
  auto w = make_world(obj, 0.5, 1, opt);
  for (auto _ : state) benchmark::DoNotOptimize(activate(w, w.rng.uniform_index(n)));
}
BENCHMARK(BM_StepRandomGraph)->Arg(10)->Arg(50)->Arg(200);

void BM_NewtonDirection(benchmark::State& state) {
  const auto obj = fig1_objective<double>();
  const Vec<double> x = Vec<double>::Zero(5);
  for (auto _ : state) benchmark::DoNotOptimize(newton_direction(*obj, x));
}
BENCHMARK(BM_NewtonDirection);

void BM_ExpectedDescentCheck(benchmark::State& state) {
  RunOptions opt;
  opt.timestamps = false;
  auto w = make_world(fig1_objective<double>(), 0.8, 1, opt);
  for (auto _ : state) benchmark::DoNotOptimize(expected_descent_check(w));
}
BENCHMARK(BM_ExpectedDescentCheck);

void BM_GossipStep(benchmark::State& state) {
  std::vector<LocalFunction<double>> locals;
  for (int i = 1; i <= 5; ++i) locals.push_back(quadratic<double>(1.0, i));
  const Graph g = Graph::complete(5);
  GossipState st{std::vector<double>(5, 0.0), 0.05, Rng(1)};
  for (auto _ : state) {
    gossip_step(st, locals, g);
    benchmark::DoNotOptimize(st.x.data());
  }
}
BENCHMARK(BM_GossipStep);

}  // namespace

BENCHMARK_MAIN();
