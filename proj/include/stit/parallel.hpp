#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stit {

// Worker count: `requested` when positive, else the STITSIM_WORKERS environment variable,
// else the OpenMP default.
int resolve_workers(int requested);

// Runs body(i) for i in [0, count) on an OpenMP team. Iterations must be independent and
// write only to their own slots. The exception of the lowest failing index is rethrown.
template <class Body>
void parallel_for_index(std::int64_t count, int workers, Body&& body) {
  std::exception_ptr error;
  std::int64_t error_index = count;
  std::mutex error_mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256) num_threads(resolve_workers(workers))
#else
  (void)workers;
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

// Serial reference for parallel_for_index.
template <class Body>
void serial_for_index(std::int64_t count, Body&& body) {
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

}  // namespace stit
