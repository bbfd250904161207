// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS /
// LATENT_REACH_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "latent_reach/kernels.hpp"
#include "latent_reach/oracle.hpp"
#include "latent_reach/toy.hpp"
#include "latent_reach/valuenet.hpp"

using namespace latent_reach;

namespace {

std::vector<float> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Full-width second layer: 16384 -> 64.
constexpr std::size_t kRows = 64, kCols = 16384;

template <bool Parallel>
void BM_Affine(benchmark::State& state) {
  const auto w = random_vec(kRows * kCols, 1), b = random_vec(kRows, 2), x = random_vec(kCols, 3);
  std::vector<float> out(kRows);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::affine<float>(w, b, x, out);
    } else {
      kernels::serial::affine<float>(w, b, x, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(kRows * kCols));
}

template <bool Parallel>
void BM_AffineTranspose(benchmark::State& state) {
  const auto w = random_vec(kRows * kCols, 1), dy = random_vec(kRows, 2);
  std::vector<float> dx(kCols);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::affine_transpose<float>(w, dy, dx);
    } else {
      kernels::serial::affine_transpose<float>(w, dy, dx);
    }
    benchmark::DoNotOptimize(dx.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(kRows * kCols));
}

template <bool Parallel>
void BM_Rank1(benchmark::State& state) {
  auto g = random_vec(kRows * kCols, 1);
  const auto dy = random_vec(kRows, 2), x = random_vec(kCols, 3);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::rank1_update<float>(g, dy, x);
    } else {
      kernels::serial::rank1_update<float>(g, dy, x);
    }
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(kRows * kCols));
}

void BM_GridBrt(benchmark::State& state) {
  const TwoAttractorSystem sys;
  const auto target = toy::failure_target(sys);
  const auto spec = GridSpec::uniform(2, -2.0, 2.0, 81);
  const auto exec = state.range(0) ? Execution::parallel : Execution::serial;
  for (auto _ : state) benchmark::DoNotOptimize(grid_brt(sys, target, spec, kDefaultOracleHorizon, exec).values.data());
}

void BM_ForwardFullWidth(benchmark::State& state) {
  const auto net = ValueNetwork::initialized(NetworkShape{64, 16384, 64}, 0);
  const auto z = random_vec(64, 4);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(std::span<const float>(z)));
}

}  // namespace

BENCHMARK(BM_Affine<false>)->Name("affine/serial");
BENCHMARK(BM_Affine<true>)->Name("affine/omp");
BENCHMARK(BM_AffineTranspose<false>)->Name("affine_transpose/serial");
BENCHMARK(BM_AffineTranspose<true>)->Name("affine_transpose/omp");
BENCHMARK(BM_Rank1<false>)->Name("rank1_update/serial");
BENCHMARK(BM_Rank1<true>)->Name("rank1_update/omp");
BENCHMARK(BM_GridBrt)->Name("grid_brt_81x81")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardFullWidth)->Name("forward_d64_h16384");

BENCHMARK_MAIN();
