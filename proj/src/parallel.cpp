#include "stit/parallel.hpp"

#include <cstdlib>
#include <string>

namespace stit {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STITSIM_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace stit
