#include "sg/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sg::parallel {

namespace {

int initial_thread_count() {
  if (const char* env = std::getenv("SUPERGAUSS_THREADS")) {
    const int k = std::atoi(env);
    if (k > 0) return k;
  }
  return 0;
}

int g_threads = initial_thread_count();

}  // namespace

int thread_count() {
  if (g_threads > 0) return g_threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int count) { g_threads = count > 0 ? count : 0; }

void tree_combine(double* partials, std::size_t chunks, std::size_t width) {
  for (std::size_t stride = 1; stride < chunks; stride *= 2) {
    for (std::size_t i = 0; i + stride < chunks; i += 2 * stride) {
      double* dst = partials + i * width;
      const double* src = partials + (i + stride) * width;
      for (std::size_t k = 0; k < width; ++k) dst[k] += src[k];
    }
  }
}

}  // namespace sg::parallel
