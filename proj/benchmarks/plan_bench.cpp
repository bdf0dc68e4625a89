#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "eipe/plan_tree.hpp"
#include "eipe_test/random_plans.hpp"

namespace {

eipe::PlanTree tree_with_nodes(std::size_t nodes) {
  std::mt19937_64 rng(nodes);
  eipe::PlanTree best = eipe::testkit::random_tree(rng, eipe::kDefaultMaxDepth, nodes);
  for (int i = 0; i < 64; ++i) {
    auto t = eipe::testkit::random_tree(rng, eipe::kDefaultMaxDepth, nodes);
    if (eipe::count_nodes(t) > eipe::count_nodes(best)) best = std::move(t);
  }
  return best;
}

void BM_Serialize(benchmark::State& state) {
  auto tree = tree_with_nodes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eipe::serialize_plan(tree));
  state.counters["nodes"] = static_cast<double>(eipe::count_nodes(tree));
}
BENCHMARK(BM_Serialize)->Arg(16)->Arg(128)->Arg(1024);

void BM_Parse(benchmark::State& state) {
  auto text = eipe::serialize_plan(tree_with_nodes(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(eipe::parse_plan(text));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse)->Arg(16)->Arg(128)->Arg(1024);

void BM_SerializeAddressed(benchmark::State& state) {
  auto tree = tree_with_nodes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eipe::serialize_addressed(tree));
}
BENCHMARK(BM_SerializeAddressed)->Arg(128)->Arg(1024);

void BM_Delta(benchmark::State& state) {
  std::mt19937_64 rng(3);
  auto a = eipe::testkit::random_tree(rng, eipe::kDefaultMaxDepth, 512);
  auto b = eipe::testkit::random_tree(rng, eipe::kDefaultMaxDepth, 512);
  for (auto _ : state) benchmark::DoNotOptimize(eipe::delta(a, b));
}
BENCHMARK(BM_Delta);

}  // namespace
