// Timing comparison of the OpenMP kernels against their serial references.
// Run directly: ./bench_kernels [n] [count]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "sg/kernels.hpp"
#include "sg/parallel.hpp"
#include "sg/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const auto& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(const char* name, double ref_ms, double par_ms) {
  std::printf("%-20s ref %9.2f ms   omp %9.2f ms   speedup %5.2fx\n", name, ref_ms,
              par_ms, ref_ms / par_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50;
  const std::size_t count = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 100000;
  std::printf("n = %zu, count = %zu, threads = %d\n", n, count,
              sg::parallel::thread_count());

  sg::RandomStream rng(1234);
  std::vector<double> rows(count * n), weights(count), values(count), theta(n);
  for (auto& x : rows) x = rng.normal();
  for (auto& w : weights) w = rng.uniform01_open();
  for (auto& v : values) v = rng.normal();
  for (auto& t : theta) t = rng.normal();

  {
    std::vector<double> out_ref(count), out_par(count);
    const double r = time_ms([&] {
      sg::ref::project_values(rows.data(), count, n, theta.data(), out_ref.data());
    });
    const double p = time_ms([&] {
      sg::kernels::project_values(rows.data(), count, n, theta.data(), out_par.data());
    });
    report("project_values", r, p);
  }

  {
    const std::size_t cand = 2048;
    std::vector<double> out_ref(cand), out_par(cand);
    const double r = time_ms([&] {
      sg::ref::cap_mass_batch(rows.data(), count, n, nullptr, 1.0 / count, rows.data(),
                              cand, 0.98, out_ref.data());
    });
    const double p = time_ms([&] {
      sg::kernels::cap_mass_batch(rows.data(), count, n, nullptr, 1.0 / count,
                                  rows.data(), cand, 0.98, out_par.data());
    });
    report("cap_mass_batch", r, p);
  }

  {
    std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> up_ref(grid.size()), lo_ref(grid.size());
    std::vector<double> up_par(grid.size()), lo_par(grid.size());
    const double r = time_ms([&] {
      sg::ref::tail_masses(values.data(), count, weights.data(), 0.0, grid.data(),
                           grid.size(), 1.0, up_ref.data(), lo_ref.data());
    });
    const double p = time_ms([&] {
      sg::kernels::tail_masses(values.data(), count, weights.data(), 0.0, grid.data(),
                               grid.size(), 1.0, up_par.data(), lo_par.data());
    });
    report("tail_masses", r, p);
  }

  {
    std::vector<double> out_ref(n * n), out_par(n * n);
    const double r = time_ms([&] {
      sg::ref::outer_product_sum(rows.data(), count, n, weights.data(), 0.0, nullptr,
                                 out_ref.data());
    });
    const double p = time_ms([&] {
      sg::kernels::outer_product_sum(rows.data(), count, n, weights.data(), 0.0, nullptr,
                                     out_par.data());
    });
    report("outer_product_sum", r, p);
  }

  return 0;
}
