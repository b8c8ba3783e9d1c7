// Serial reference vs OpenMP kernels on pipeline-sized inputs.

#include <benchmark/benchmark.h>

#include "pedrole/kernels.hpp"
#include "pedrole/random.hpp"

namespace {

using namespace pedrole;

MatrixF random_f(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  MatrixF m(rows, cols);
  for (float& v : m.data()) v = static_cast<float>(rng.normal());
  return m;
}

MatrixD random_d(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  MatrixD m(rows, cols);
  for (double& v : m.data()) v = rng.uniform01();
  return m;
}

// args: points, centroids, dim
template <bool Parallel>
void BM_AssignNearest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto dim = static_cast<std::size_t>(state.range(2));
  const MatrixF points = random_f(n, dim, 1);
  const MatrixF centroids = random_f(k, dim, 2);
  std::vector<std::uint32_t> labels(n);
  std::vector<double> sq(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::parallel::assign_nearest(points, centroids, labels, sq);
    } else {
      kernels::serial::assign_nearest(points, centroids, labels, sq);
    }
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * k));
}

// args: training documents, clusters (feature width)
template <bool Parallel>
void BM_L1Distances(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const MatrixD points = random_d(n, dim, 3);
  const MatrixD query = random_d(1, dim, 4);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::parallel::l1_distances(query.row(0), points, out);
    } else {
      kernels::serial::l1_distances(query.row(0), points, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_AssignNearest<false>)->Args({4800, 300, 256})->Args({4800, 300, 4800})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignNearest<true>)->Args({4800, 300, 256})->Args({4800, 300, 4800})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_L1Distances<false>)->Args({1000, 300})->Args({10000, 300})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_L1Distances<true>)->Args({1000, 300})->Args({10000, 300})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
