#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "eipe/kmeans.hpp"

namespace {

std::vector<eipe::Vector> blobs(std::size_t n, std::size_t dim, std::size_t centres) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<eipe::Vector> out(n, eipe::Vector(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d)
      out[i][d] = static_cast<double>((i % centres) * 3 + d % 2) + noise(rng);
  return out;
}

void BM_KMeans(benchmark::State& state) {
  auto data = blobs(static_cast<std::size_t>(state.range(0)), 1536, 8);
  for (auto _ : state) benchmark::DoNotOptimize(eipe::kmeans(data, 8, 42));
}
BENCHMARK(BM_KMeans)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Cosine(benchmark::State& state) {
  auto data = blobs(2, 1536, 2);
  for (auto _ : state) benchmark::DoNotOptimize(eipe::cosine_similarity(data[0], data[1]));
}
BENCHMARK(BM_Cosine);

}  // namespace
