#include <benchmark/benchmark.h>

#include "cdqn/agents/losses.hpp"
#include "cdqn/conformal/conformal.hpp"
#include "cdqn/mdp/impute.hpp"
#include "cdqn/nn/adam.hpp"
#include "cdqn/rng.hpp"
#include "cdqn/sim/simulator.hpp"

using namespace cdqn;

namespace {

nn::Matrix random_states(int dim, int n, std::uint64_t seed) {
  Rng rng(seed);
  nn::Matrix s(dim, n);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = rng.normal();
  return s;
}

std::vector<int> hidden_of(const benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  return {h, h};
}

}  // namespace

static void BM_QNetForward(benchmark::State& state) {
  const auto net = nn::init_network(agents::layer_sizes(44, hidden_of(state), 343), 1);
  const auto x = random_states(44, 256, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_QNetForward)->Arg(64)->Arg(256);

static void BM_QNetForwardBackwardAdam(benchmark::State& state) {
  auto net = nn::init_network(agents::layer_sizes(44, hidden_of(state), 343), 1);
  auto opt = nn::AdamState::for_network(net);
  const auto x = random_states(44, 256, 2);
  const nn::Matrix g = random_states(343, 256, 3) * 1e-3;
  for (auto _ : state) {
    nn::ForwardCache cache;
    net.forward(x, cache);
    nn::adam_step(net, net.backward(cache, g), opt, 1e-4);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_QNetForwardBackwardAdam)->Arg(64)->Arg(256);

static void BM_CalibrateScores(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (auto& s : scores) s = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(conformal::calibrate_scores(scores, 0.15));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CalibrateScores)->Arg(1000)->Arg(100000);

static void BM_SelectActions(benchmark::State& state) {
  const auto q = nn::init_network(agents::layer_sizes(44, {256, 256}, 343), 5);
  const agents::PolicyNet p{nn::init_network(agents::layer_sizes(44, {256, 256}, 343), 6)};
  const auto x = random_states(44, 1024, 7);
  for (auto _ : state) benchmark::DoNotOptimize(conformal::select_actions(q, p, x, 0.95));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SelectActions);

static void BM_SimulateDataset(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.n_patients = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::generate_dataset(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDataset)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Impute(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.n_patients = static_cast<std::size_t>(state.range(0));
  const auto raw = sim::generate_dataset(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(mdp::impute(raw));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Impute)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
