// Parallel vs serial matrix products at the shapes the decoder uses.
#include <benchmark/benchmark.h>

#include "deconet/kernels.hpp"
#include "deconet/rng.hpp"

using deconet::Mat;

namespace {

Mat random(std::size_t r, std::size_t c, std::uint64_t seed) {
  deconet::Rng rng(seed);
  Mat m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

// W x for a batch: (N x n) * (n x batch).
template <Mat (*F)(const Mat&, const Mat&)>
void forward_product(benchmark::State& st) {
  const auto N = static_cast<std::size_t>(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const Mat W = random(N, n, 1), X = random(n, 128, 2);
  for (auto _ : st) benchmark::DoNotOptimize(F(W, X));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(N * n * 128));
}

// W^T z for a batch: (N x n)^T * (N x batch).
template <Mat (*F)(const Mat&, const Mat&)>
void transpose_product(benchmark::State& st) {
  const auto N = static_cast<std::size_t>(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const Mat W = random(N, n, 1), Z = random(N, 128, 2);
  for (auto _ : st) benchmark::DoNotOptimize(F(W, Z));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(N * n * 128));
}

// Gradient outer product: (N x batch) * (n x batch)^T.
template <Mat (*F)(const Mat&, const Mat&)>
void outer_product(benchmark::State& st) {
  const auto N = static_cast<std::size_t>(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const Mat G = random(N, 128, 1), X = random(n, 128, 2);
  for (auto _ : st) benchmark::DoNotOptimize(F(G, X));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(N * n * 128));
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({40, 20})->Args({200, 20})->Args({500, 100})->Args({1000, 196});
}

}  // namespace

BENCHMARK(forward_product<deconet::kernels::matmul>)->Name("matmul/omp")->Apply(shapes);
BENCHMARK(forward_product<deconet::kernels::serial::matmul>)->Name("matmul/serial")->Apply(shapes);
BENCHMARK(transpose_product<deconet::kernels::matmul_tn>)->Name("matmul_tn/omp")->Apply(shapes);
BENCHMARK(transpose_product<deconet::kernels::serial::matmul_tn>)->Name("matmul_tn/serial")->Apply(shapes);
BENCHMARK(outer_product<deconet::kernels::matmul_nt>)->Name("matmul_nt/omp")->Apply(shapes);
BENCHMARK(outer_product<deconet::kernels::serial::matmul_nt>)->Name("matmul_nt/serial")->Apply(shapes);

BENCHMARK_MAIN();
