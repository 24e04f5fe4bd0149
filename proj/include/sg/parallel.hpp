#ifndef SG_PARALLEL_HPP
#define SG_PARALLEL_HPP

#include <cstddef>

namespace sg::parallel {

// Worker count used by the OpenMP kernels. 0 means "runtime default".
// Initialized from SUPERGAUSS_THREADS when set.
int thread_count();
void set_thread_count(int count);

// Fixed chunk size for all deterministic reductions. Chunk boundaries depend
// only on the problem size, never on the worker count, so per-chunk partials
// and their combination order are reproducible bit-for-bit.
inline constexpr std::size_t kChunk = 4096;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

inline std::size_t chunk_begin(std::size_t c) { return c * kChunk; }

inline std::size_t chunk_end(std::size_t c, std::size_t n) {
  const std::size_t e = (c + 1) * kChunk;
  return e < n ? e : n;
}

// In-place pairwise tree combine of per-chunk partials laid out in a flat
// buffer of `chunks` slots each of `width` doubles. The combination order is
// a fixed binary tree over chunk indices, independent of thread count.
void tree_combine(double* partials, std::size_t chunks, std::size_t width);

}  // namespace sg::parallel

#endif  // SG_PARALLEL_HPP
