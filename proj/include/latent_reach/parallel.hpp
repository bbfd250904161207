#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace latent_reach {

/// Applies LATENT_REACH_THREADS (if set and positive) as the OpenMP worker cap.
/// Returns the resulting maximum thread count.
int configure_threads_from_env();

int max_threads();

/// Serial paths are the reference implementation; parallel paths must agree
/// with them bit-for-bit.
enum class Execution { serial, parallel };

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
/// results do not depend on scheduling. The first exception thrown by any
/// iteration is rethrown after the loop.
template <typename Fn>
void for_each_index(Execution exec, std::size_t n, Fn&& fn) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace latent_reach
