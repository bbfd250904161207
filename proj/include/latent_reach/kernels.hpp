#pragma once

#include <cstddef>
#include <span>

// Dense kernels behind the value network. Row-major weights: W[j * cols + k].
// `serial` is the reference; `omp` splits rows (or column blocks) across
// threads without changing any per-element summation order, so both produce
// bit-identical results for any thread count.
namespace latent_reach::kernels {

/// Work size (rows * cols) below which the OpenMP variants stay serial.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

namespace serial {

/// out[j] = b[j] + sum_k W[j,k] x[k]
template <typename T>
void affine(std::span<const T> w, std::span<const T> b, std::span<const T> x, std::span<T> out);

/// dx[k] = sum_j W[j,k] dy[j]
template <typename T>
void affine_transpose(std::span<const T> w, std::span<const T> dy, std::span<T> dx);

/// g[j,k] += dy[j] x[k]
template <typename T>
void rank1_update(std::span<T> g, std::span<const T> dy, std::span<const T> x);

}  // namespace serial

namespace omp {

template <typename T>
void affine(std::span<const T> w, std::span<const T> b, std::span<const T> x, std::span<T> out);

template <typename T>
void affine_transpose(std::span<const T> w, std::span<const T> dy, std::span<T> dx);

template <typename T>
void rank1_update(std::span<T> g, std::span<const T> dy, std::span<const T> x);

}  // namespace omp

}  // namespace latent_reach::kernels
