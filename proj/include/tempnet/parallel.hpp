#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tempnet {

/// Selects between a kernel's OpenMP implementation and its serial
/// reference. Both must produce identical results.
enum class Exec { kSerial, kParallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs f(i) for i in [0, n). Iterations must be independent. The first
/// exception (lowest failing index) is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& f) {
#ifdef _OPENMP
  const auto count = static_cast<std::ptrdiff_t>(n);
  std::exception_ptr failure;
  std::ptrdiff_t failure_index = count;
  std::mutex failure_mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (i < failure_index) {
        failure_index = i;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (std::size_t i = 0; i < n; ++i) {
    f(i);
  }
#endif
}

template <typename Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& f) {
  if (exec == Exec::kParallel) {
    parallel_for(n, f);
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

}  // namespace tempnet
