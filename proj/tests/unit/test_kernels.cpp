#include <omp.h>

#include <random>

#include "doctest.h"
#include "latent_reach/kernels.hpp"
#include "latent_reach/parallel.hpp"

using namespace latent_reach;

namespace {

template <typename T>
std::vector<T> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(u(rng));
  return v;
}

template <typename T>
void check_bit_identical(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(rows * 131 + cols);
  const auto w = random_vec<T>(rng, rows * cols);
  const auto b = random_vec<T>(rng, rows);
  const auto x = random_vec<T>(rng, cols);
  const auto dy = random_vec<T>(rng, rows);

  std::vector<T> o1(rows), o2(rows);
  kernels::serial::affine<T>(w, b, x, o1);
  kernels::omp::affine<T>(w, b, x, o2);
  CHECK(o1 == o2);

  std::vector<T> d1(cols), d2(cols);
  kernels::serial::affine_transpose<T>(w, dy, d1);
  kernels::omp::affine_transpose<T>(w, dy, d2);
  CHECK(d1 == d2);

  auto g1 = random_vec<T>(rng, rows * cols);
  auto g2 = g1;
  kernels::serial::rank1_update<T>(g1, dy, x);
  kernels::omp::rank1_update<T>(g2, dy, x);
  CHECK(g1 == g2);
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("serial affine matches hand arithmetic") {
    const std::vector<double> w{1, 2, 3, 4, 5, 6}, b{0.5, -1}, x{1, 0, -1};
    std::vector<double> out(2);
    kernels::serial::affine<double>(w, b, x, out);
    CHECK(out == std::vector<double>{0.5 - 2.0, -1.0 - 2.0});
    std::vector<double> dx(3);
    kernels::serial::affine_transpose<double>(w, std::vector<double>{1, 1}, dx);
    CHECK(dx == std::vector<double>{5, 7, 9});
    std::vector<double> g(6, 0.0);
    kernels::serial::rank1_update<double>(g, std::vector<double>{1, 2}, x);
    CHECK(g == std::vector<double>{1, 0, -1, 2, 0, -2});
  }

  TEST_CASE("omp kernels are bit-identical to serial for any thread count") {
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 4}) {
      omp_set_num_threads(threads);
      check_bit_identical<float>(3, 5);
      check_bit_identical<float>(1024, 64);      // above the parallel threshold
      check_bit_identical<float>(64, 1030);      // ragged column blocks
      check_bit_identical<double>(300, 200);
    }
    omp_set_num_threads(saved);
  }
}

TEST_SUITE("parallel") {
  TEST_CASE("for_each_index covers every index once and rethrows") {
    for (auto exec : {Execution::serial, Execution::parallel}) {
      std::vector<int> hits(1000, 0);
      for_each_index(exec, hits.size(), [&](std::size_t i) { hits[i] += 1; });
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
      CHECK_THROWS_WITH(for_each_index(exec, 100,
                                       [](std::size_t i) {
                                         if (i == 37) throw std::runtime_error("boom");
                                       }),
                        "boom");
    }
  }

  TEST_CASE("LATENT_REACH_THREADS caps workers") {
    const int saved = omp_get_max_threads();
    setenv("LATENT_REACH_THREADS", "3", 1);
    CHECK(configure_threads_from_env() == 3);
    CHECK(max_threads() == 3);
    unsetenv("LATENT_REACH_THREADS");
    omp_set_num_threads(saved);
  }
}
