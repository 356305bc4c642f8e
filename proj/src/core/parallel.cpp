#include "conelab/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace conelab {

int configure_threads_from_env() {
  if (const char* env = std::getenv("CONELAB_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      // ignore malformed values; OpenMP defaults apply
    }
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace conelab
