#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "eipe/refinement.hpp"
#include "eipe_test/random_plans.hpp"

namespace {

void BM_ApplyBatch(benchmark::State& state) {
  std::mt19937_64 rng(11);
  auto tree = eipe::testkit::random_tree(rng, eipe::kDefaultMaxDepth, 256);
  eipe::InstructionBatch batch;
  for (int64_t i = 0; i < state.range(0); ++i)
    batch.entries.push_back({eipe::testkit::random_instruction(tree, rng), std::nullopt});
  std::size_t applied = 0;
  for (auto _ : state) {
    auto [out, report] = eipe::apply_batch(tree, batch);
    applied = report.applied.total();
    benchmark::DoNotOptimize(out);
  }
  state.counters["applied"] = static_cast<double>(applied);
}
BENCHMARK(BM_ApplyBatch)->Arg(1)->Arg(8)->Arg(64);

void BM_ParseInstructions(benchmark::State& state) {
  std::mt19937_64 rng(12);
  auto tree = eipe::testkit::random_tree(rng, eipe::kDefaultMaxDepth, 256);
  std::string text;
  for (int i = 0; i < 64; ++i)
    text += eipe::format_instruction(eipe::testkit::random_instruction(tree, rng)) + "\n";
  for (auto _ : state) benchmark::DoNotOptimize(eipe::parse_instructions(text));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseInstructions);

}  // namespace
