#ifndef SG_KERNELS_HPP
#define SG_KERNELS_HPP

#include <cstddef>

// Data-parallel inner loops. sg::kernels holds the OpenMP implementations
// used by the library; sg::ref holds straightforward serial references kept
// for testing and benchmarking. Both compute per-output values in the same
// element order, and the parallel variants use fixed chunking, so results do
// not depend on the worker count.
//
// Row arguments are row-major matrices (count x n). A null `weights` pointer
// means every row carries the same weight `uniform_w`; in that case mass
// accumulation happens in exact integer counts.

namespace sg::kernels {

// out[i] = <rows_i, theta>
void project_values(const double* rows, std::size_t count, std::size_t n,
                    const double* theta, double* out);

// out_mass[j] = sum_i w_i * [ <rows_i, cand_j> >= cos_threshold ]
void cap_mass_batch(const double* rows, std::size_t count, std::size_t n,
                    const double* weights, double uniform_w,
                    const double* cand_rows, std::size_t cand_count,
                    double cos_threshold, double* out_mass);

// For each grid point g with threshold t_grid[g] * scale:
//   out_upper[g] = sum_i w_i * [ values_i >  threshold ]
//   out_lower[g] = sum_i w_i * [ values_i < -threshold ]
void tail_masses(const double* values, std::size_t count,
                 const double* weights, double uniform_w,
                 const double* t_grid, std::size_t grid_count, double scale,
                 double* out_upper, double* out_lower);

// out (n x n row-major, symmetric) = sum_i (w_i / div_i) rows_i rows_i^T.
// div == nullptr means all divisors are 1.
void outer_product_sum(const double* rows, std::size_t count, std::size_t n,
                       const double* weights, double uniform_w,
                       const double* div, double* out);

}  // namespace sg::kernels

namespace sg::ref {

void project_values(const double* rows, std::size_t count, std::size_t n,
                    const double* theta, double* out);

void cap_mass_batch(const double* rows, std::size_t count, std::size_t n,
                    const double* weights, double uniform_w,
                    const double* cand_rows, std::size_t cand_count,
                    double cos_threshold, double* out_mass);

void tail_masses(const double* values, std::size_t count,
                 const double* weights, double uniform_w,
                 const double* t_grid, std::size_t grid_count, double scale,
                 double* out_upper, double* out_lower);

void outer_product_sum(const double* rows, std::size_t count, std::size_t n,
                       const double* weights, double uniform_w,
                       const double* div, double* out);

}  // namespace sg::ref

#endif  // SG_KERNELS_HPP
