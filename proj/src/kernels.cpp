#include "latent_reach/kernels.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace latent_reach::kernels {

namespace serial {

template <typename T>
void affine(std::span<const T> w, std::span<const T> b, std::span<const T> x, std::span<T> out) {
  const std::size_t rows = out.size(), cols = x.size();
  assert(w.size() == rows * cols && b.size() == rows);
  for (std::size_t j = 0; j < rows; ++j) {
    const T* row = w.data() + j * cols;
    T acc = T(0);
    for (std::size_t k = 0; k < cols; ++k) acc += row[k] * x[k];
    out[j] = acc + b[j];
  }
}

template <typename T>
void affine_transpose(std::span<const T> w, std::span<const T> dy, std::span<T> dx) {
  const std::size_t rows = dy.size(), cols = dx.size();
  assert(w.size() == rows * cols);
  std::fill(dx.begin(), dx.end(), T(0));
  for (std::size_t j = 0; j < rows; ++j) {
    const T* row = w.data() + j * cols;
    for (std::size_t k = 0; k < cols; ++k) dx[k] += row[k] * dy[j];
  }
}

template <typename T>
void rank1_update(std::span<T> g, std::span<const T> dy, std::span<const T> x) {
  const std::size_t rows = dy.size(), cols = x.size();
  assert(g.size() == rows * cols);
  for (std::size_t j = 0; j < rows; ++j) {
    T* row = g.data() + j * cols;
    for (std::size_t k = 0; k < cols; ++k) row[k] += dy[j] * x[k];
  }
}

}  // namespace serial

namespace omp {

template <typename T>
void affine(std::span<const T> w, std::span<const T> b, std::span<const T> x, std::span<T> out) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(out.size());
  const std::size_t cols = x.size();
  assert(w.size() == out.size() * cols && b.size() == out.size());
#pragma omp parallel for schedule(static) if (out.size() * cols >= kParallelThreshold)
  for (std::ptrdiff_t j = 0; j < rows; ++j) {
    const T* row = w.data() + j * cols;
    T acc = T(0);
    for (std::size_t k = 0; k < cols; ++k) acc += row[k] * x[k];
    out[j] = acc + b[j];
  }
}

template <typename T>
void affine_transpose(std::span<const T> w, std::span<const T> dy, std::span<T> dx) {
  constexpr std::size_t kBlock = 64;
  const std::size_t rows = dy.size(), cols = dx.size();
  assert(w.size() == rows * cols);
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((cols + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t k0 = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t k1 = std::min(cols, k0 + kBlock);
    std::array<T, kBlock> acc{};
    for (std::size_t j = 0; j < rows; ++j) {
      const T* row = w.data() + j * cols;
      for (std::size_t k = k0; k < k1; ++k) acc[k - k0] += row[k] * dy[j];
    }
    std::copy(acc.begin(), acc.begin() + (k1 - k0), dx.begin() + k0);
  }
}

template <typename T>
void rank1_update(std::span<T> g, std::span<const T> dy, std::span<const T> x) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(dy.size());
  const std::size_t cols = x.size();
  assert(g.size() == dy.size() * cols);
#pragma omp parallel for schedule(static) if (dy.size() * cols >= kParallelThreshold)
  for (std::ptrdiff_t j = 0; j < rows; ++j) {
    T* row = g.data() + j * cols;
    for (std::size_t k = 0; k < cols; ++k) row[k] += dy[j] * x[k];
  }
}

}  // namespace omp

#define LATENT_REACH_INSTANTIATE(NS, T)                                                                  \
  template void NS::affine<T>(std::span<const T>, std::span<const T>, std::span<const T>, std::span<T>); \
  template void NS::affine_transpose<T>(std::span<const T>, std::span<const T>, std::span<T>);           \
  template void NS::rank1_update<T>(std::span<T>, std::span<const T>, std::span<const T>);

LATENT_REACH_INSTANTIATE(serial, float)
LATENT_REACH_INSTANTIATE(serial, double)
LATENT_REACH_INSTANTIATE(omp, float)
LATENT_REACH_INSTANTIATE(omp, double)

#undef LATENT_REACH_INSTANTIATE

}  // namespace latent_reach::kernels
