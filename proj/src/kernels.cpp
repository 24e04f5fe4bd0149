#include "sg/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sg/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sg {

namespace {

// Single-accumulator dot product in index order. Both implementations of
// every kernel run per-output accumulation through the same operation
// sequence, which is what makes ref and kernels comparable bit-for-bit.
inline double dot_n(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t d = 0; d < n; ++d) acc += a[d] * b[d];
  return acc;
}

// Candidate block width for the cap-mass kernel.
constexpr std::size_t kCandBlock = 8;

// Outer-product partial buffers are capped at 8M doubles total, so the chunk
// count shrinks for large n. Depends only on (count, n): deterministic.
std::size_t outer_chunk_count(std::size_t count, std::size_t n) {
  const std::size_t cap = std::max<std::size_t>(1, (8u << 20) / (n * n));
  return std::min(parallel::chunk_count(count), cap);
}

void accumulate_outer(const double* rows, std::size_t begin, std::size_t end,
                      std::size_t n, const double* weights, const double* div,
                      double* partial) {
  for (std::size_t i = begin; i < end; ++i) {
    const double* x = rows + i * n;
    double s = weights ? weights[i] : 1.0;
    if (div) s /= div[i];
    for (std::size_t a = 0; a < n; ++a) {
      const double xa = s * x[a];
      double* out_row = partial + a * n;
      for (std::size_t b = a; b < n; ++b) out_row[b] += xa * x[b];
    }
  }
}

void mirror_lower(double* m, std::size_t n) {
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) m[b * n + a] = m[a * n + b];
}

void scale_all(double* m, std::size_t n2, double s) {
  for (std::size_t k = 0; k < n2; ++k) m[k] *= s;
}

}  // namespace

namespace kernels {

void project_values(const double* rows, std::size_t count, std::size_t n,
                    const double* theta, double* out) {
  const int threads = parallel::thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
    out[i] = dot_n(rows + static_cast<std::size_t>(i) * n, theta, n);
  (void)threads;
}

void cap_mass_batch(const double* rows, std::size_t count, std::size_t n,
                    const double* weights, double uniform_w,
                    const double* cand_rows, std::size_t cand_count,
                    double cos_threshold, double* out_mass) {
  const int threads = parallel::thread_count();
  const std::size_t blocks = (cand_count + kCandBlock - 1) / kCandBlock;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
  {
    std::vector<double> cblk(kCandBlock * n);
    std::vector<double> acc(kCandBlock);
    std::vector<double> mass(kCandBlock);
    std::vector<std::uint64_t> hits(kCandBlock);
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 1)
#endif
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
      const std::size_t j0 = static_cast<std::size_t>(blk) * kCandBlock;
      const std::size_t bw = std::min(kCandBlock, cand_count - j0);
      // Transposed candidate block: cblk[d * kCandBlock + b].
      for (std::size_t b = 0; b < bw; ++b)
        for (std::size_t d = 0; d < n; ++d)
          cblk[d * kCandBlock + b] = cand_rows[(j0 + b) * n + d];
      for (std::size_t b = bw; b < kCandBlock; ++b)
        for (std::size_t d = 0; d < n; ++d) cblk[d * kCandBlock + b] = 0.0;

      std::fill(mass.begin(), mass.end(), 0.0);
      std::fill(hits.begin(), hits.end(), 0);
      for (std::size_t i = 0; i < count; ++i) {
        const double* x = rows + i * n;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t d = 0; d < n; ++d) {
          const double xd = x[d];
          const double* c = cblk.data() + d * kCandBlock;
          for (std::size_t b = 0; b < kCandBlock; ++b) acc[b] += xd * c[b];
        }
        if (weights) {
          for (std::size_t b = 0; b < bw; ++b)
            if (acc[b] >= cos_threshold) mass[b] += weights[i];
        } else {
          for (std::size_t b = 0; b < bw; ++b)
            if (acc[b] >= cos_threshold) ++hits[b];
        }
      }
      for (std::size_t b = 0; b < bw; ++b)
        out_mass[j0 + b] =
            weights ? mass[b] : static_cast<double>(hits[b]) * uniform_w;
    }
  }
  (void)threads;
}

void tail_masses(const double* values, std::size_t count,
                 const double* weights, double uniform_w,
                 const double* t_grid, std::size_t grid_count, double scale,
                 double* out_upper, double* out_lower) {
  const int threads = parallel::thread_count();
  std::vector<double> thr(grid_count);
  for (std::size_t g = 0; g < grid_count; ++g) thr[g] = t_grid[g] * scale;

  const std::size_t chunks = parallel::chunk_count(count);
  const std::size_t width = 2 * grid_count;

  if (!weights) {
    // Uniform weights: integer hit counts, exact under any summation order.
    std::vector<std::uint64_t> counts(chunks * width, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
      std::uint64_t* part = counts.data() + static_cast<std::size_t>(c) * width;
      const std::size_t end = parallel::chunk_end(static_cast<std::size_t>(c), count);
      for (std::size_t i = parallel::chunk_begin(static_cast<std::size_t>(c)); i < end; ++i) {
        const double v = values[i];
        for (std::size_t g = 0; g < grid_count; ++g) {
          part[2 * g] += v > thr[g];
          part[2 * g + 1] += v < -thr[g];
        }
      }
    }
    for (std::size_t g = 0; g < grid_count; ++g) {
      std::uint64_t up = 0, lo = 0;
      for (std::size_t c = 0; c < chunks; ++c) {
        up += counts[c * width + 2 * g];
        lo += counts[c * width + 2 * g + 1];
      }
      out_upper[g] = static_cast<double>(up) * uniform_w;
      out_lower[g] = static_cast<double>(lo) * uniform_w;
    }
    return;
  }

  std::vector<double> partials(chunks * width, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    double* part = partials.data() + static_cast<std::size_t>(c) * width;
    const std::size_t end = parallel::chunk_end(static_cast<std::size_t>(c), count);
    for (std::size_t i = parallel::chunk_begin(static_cast<std::size_t>(c)); i < end; ++i) {
      const double v = values[i];
      const double w = weights[i];
      for (std::size_t g = 0; g < grid_count; ++g) {
        if (v > thr[g]) part[2 * g] += w;
        if (v < -thr[g]) part[2 * g + 1] += w;
      }
    }
  }
  parallel::tree_combine(partials.data(), chunks, width);
  for (std::size_t g = 0; g < grid_count; ++g) {
    out_upper[g] = partials[2 * g];
    out_lower[g] = partials[2 * g + 1];
  }
  (void)threads;
}

void outer_product_sum(const double* rows, std::size_t count, std::size_t n,
                       const double* weights, double uniform_w,
                       const double* div, double* out) {
  const int threads = parallel::thread_count();
  const std::size_t chunks = outer_chunk_count(count, n);
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<double> partials(chunks * n * n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * step;
    const std::size_t end = std::min(count, begin + step);
    accumulate_outer(rows, begin, end, n, weights, div,
                     partials.data() + static_cast<std::size_t>(c) * n * n);
  }
  parallel::tree_combine(partials.data(), chunks, n * n);
  std::copy_n(partials.data(), n * n, out);
  if (!weights) scale_all(out, n * n, uniform_w);
  mirror_lower(out, n);
  (void)threads;
}

}  // namespace kernels

namespace ref {

void project_values(const double* rows, std::size_t count, std::size_t n,
                    const double* theta, double* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = dot_n(rows + i * n, theta, n);
}

void cap_mass_batch(const double* rows, std::size_t count, std::size_t n,
                    const double* weights, double uniform_w,
                    const double* cand_rows, std::size_t cand_count,
                    double cos_threshold, double* out_mass) {
  for (std::size_t j = 0; j < cand_count; ++j) {
    const double* c = cand_rows + j * n;
    double mass = 0.0;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (dot_n(rows + i * n, c, n) >= cos_threshold) {
        if (weights)
          mass += weights[i];
        else
          ++hits;
      }
    }
    out_mass[j] = weights ? mass : static_cast<double>(hits) * uniform_w;
  }
}

void tail_masses(const double* values, std::size_t count,
                 const double* weights, double uniform_w,
                 const double* t_grid, std::size_t grid_count, double scale,
                 double* out_upper, double* out_lower) {
  for (std::size_t g = 0; g < grid_count; ++g) {
    const double thr = t_grid[g] * scale;
    double up = 0.0, lo = 0.0;
    std::uint64_t up_n = 0, lo_n = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (values[i] > thr) {
        if (weights)
          up += weights[i];
        else
          ++up_n;
      }
      if (values[i] < -thr) {
        if (weights)
          lo += weights[i];
        else
          ++lo_n;
      }
    }
    out_upper[g] = weights ? up : static_cast<double>(up_n) * uniform_w;
    out_lower[g] = weights ? lo : static_cast<double>(lo_n) * uniform_w;
  }
}

void outer_product_sum(const double* rows, std::size_t count, std::size_t n,
                       const double* weights, double uniform_w,
                       const double* div, double* out) {
  std::fill(out, out + n * n, 0.0);
  accumulate_outer(rows, 0, count, n, weights, div, out);
  if (!weights) scale_all(out, n * n, uniform_w);
  mirror_lower(out, n);
}

}  // namespace ref

}  // namespace sg
