#include "sg/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "sg/error.hpp"
#include "sg/kernels.hpp"
#include "sg/parallel.hpp"
#include "sg/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sg {

namespace {

// One-sided 95% quantile of the standard normal.
constexpr double kWilsonZ = 1.6448536269514722;

double wilson_lower_bound(double p_hat, double n_eff) {
  if (n_eff <= 0.0) return 0.0;
  const double z2 = kWilsonZ * kWilsonZ;
  const double center = p_hat + z2 / (2.0 * n_eff);
  const double spread =
      kWilsonZ * std::sqrt(p_hat * (1.0 - p_hat) / n_eff + z2 / (4.0 * n_eff * n_eff));
  return std::max(0.0, (center - spread) / (1.0 + z2 / n_eff));
}

Eigen::VectorXd projection_values(const Dataset& data, const UnitVector& theta) {
  if (theta.dim() != data.dim())
    throw Error("invalid-dimension", "direction does not match dataset dimension");
  Eigen::VectorXd values(static_cast<Eigen::Index>(data.size()));
  kernels::project_values(data.samples().data(), data.size(),
                          static_cast<std::size_t>(data.dim()), theta.coords().data(),
                          values.data());
  return values;
}

double binomial_coefficient(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return c;
}

}  // namespace

double median_abs(const Dataset& data, const UnitVector& theta) {
  const Eigen::VectorXd values = projection_values(data, theta);
  const std::size_t count = data.size();
  std::vector<double> abs_values(count);
  for (std::size_t i = 0; i < count; ++i)
    abs_values[i] = std::abs(values[static_cast<Eigen::Index>(i)]);
  if (*std::max_element(abs_values.begin(), abs_values.end()) == 0.0)
    throw Error("degenerate-direction", "all projections vanish");

  if (data.uniform_weights()) {
    const std::size_t idx = (count + 1) / 2 - 1;  // lower median
    std::nth_element(abs_values.begin(), abs_values.begin() + static_cast<std::ptrdiff_t>(idx),
                     abs_values.end());
    return abs_values[idx];
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return abs_values[a] != abs_values[b] ? abs_values[a] < abs_values[b] : a < b;
  });
  double cum = 0.0;
  for (std::size_t r : order) {
    cum += data.weight(r);
    if (cum + 1e-12 >= 0.5) return abs_values[r];
  }
  return abs_values[order.back()];
}

TailCurve tail_curve(const Dataset& data, const UnitVector& theta, double m_med,
                     const std::vector<double>& t_grid) {
  if (!(m_med > 0.0)) throw Error("invalid-input", "median must be positive");
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw Error("invalid-input", "grid must start at 0");
  for (std::size_t g = 1; g < t_grid.size(); ++g)
    if (!(t_grid[g] > t_grid[g - 1]))
      throw Error("invalid-input", "grid must be strictly increasing");

  const Eigen::VectorXd values = projection_values(data, theta);
  TailCurve curve;
  curve.t_grid = t_grid;
  curve.upper.resize(t_grid.size());
  curve.lower.resize(t_grid.size());
  curve.ci_lower_bounds.resize(t_grid.size());
  curve.sample_count = data.size();
  kernels::tail_masses(values.data(), data.size(), data.weights_ptr(), data.uniform_weight(),
                       t_grid.data(), t_grid.size(), m_med, curve.upper.data(),
                       curve.lower.data());
  const double n_eff = data.effective_sample_size();
  for (std::size_t g = 0; g < t_grid.size(); ++g)
    curve.ci_lower_bounds[g] = wilson_lower_bound(curve.min_tail(g), n_eff);
  return curve;
}

SuperGaussianCertificate certify(const TailCurve& curve, double alpha, double beta,
                                 double length, double m_med) {
  if (alpha < 0.0 || !(beta > 0.0) || !(length > 0.0))
    throw Error("invalid-input", "certificate parameters must be positive");
  SuperGaussianCertificate cert;
  cert.alpha = alpha;
  cert.beta = beta;
  cert.length = length;
  cert.median_abs_value = m_med;
  cert.pass = true;
  for (std::size_t g = 0; g < curve.t_grid.size(); ++g) {
    const double t = curve.t_grid[g];
    if (t > length * (1.0 + 1e-12)) break;
    const double bound = alpha * std::exp(-t * t / beta);
    if (curve.ci_lower_bounds[g] < bound) {
      cert.pass = false;
      cert.failing_t = t;
      break;
    }
  }
  return cert;
}

std::pair<double, double> fit_parameters(const TailCurve& curve, double length) {
  std::vector<std::size_t> pts;
  for (std::size_t g = 0; g < curve.t_grid.size(); ++g)
    if (curve.t_grid[g] <= length * (1.0 + 1e-12) && curve.min_tail(g) > 0.0)
      pts.push_back(g);
  if (pts.size() < 3)
    throw Error("insufficient-tail", "need at least 3 grid points with positive tails");

  // Least squares of ln(ci_lb) against -t^2.
  double mx = 0.0, my = 0.0;
  for (std::size_t g : pts) {
    mx += -curve.t_grid[g] * curve.t_grid[g];
    my += std::log(curve.ci_lower_bounds[g]);
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t g : pts) {
    const double dx = -curve.t_grid[g] * curve.t_grid[g] - mx;
    sxy += dx * (std::log(curve.ci_lower_bounds[g]) - my);
    sxx += dx * dx;
  }
  constexpr double kBetaCap = 1e6;
  double beta = kBetaCap;
  if (sxx > 0.0) {
    const double slope = sxy / sxx;
    if (slope > 1.0 / kBetaCap) beta = 1.0 / slope;
  }

  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < curve.t_grid.size(); ++g) {
    if (curve.t_grid[g] > length * (1.0 + 1e-12)) break;
    const double t = curve.t_grid[g];
    alpha = std::min(alpha, curve.ci_lower_bounds[g] * std::exp(t * t / beta));
  }
  return {alpha, beta};
}

bool median_bound_check(const Dataset& data, const UnitVector& theta, double M) {
  const double med = median_abs(data, theta);
  return med <= 6.0 * M / std::sqrt(static_cast<double>(data.dim()));
}

bool check_binomial_count_bound(int N, int k, double p) {
  if (k < 1 || k > N || N > 25) throw Error("invalid-input", "need 1 <= k <= N <= 25");
  if (p < 0.0 || p > 1.0) throw Error("invalid-input", "p must lie in [0,1]");
  const double eps = std::pow(1.0 - p, k);
  const int threshold = (N + 3 * k - 1) / (3 * k);  // ceil(N / (3k))
  long double tail = 0.0L;
  for (int j = threshold; j <= N; ++j)
    tail += static_cast<long double>(binomial_coefficient(N, j)) *
            std::pow(static_cast<long double>(p), j) *
            std::pow(static_cast<long double>(1.0 - p), N - j);
  return static_cast<double>(tail) >= 1.0 - 2.0 * eps - 1e-12;
}

double pairwise_cosine_check(const Dataset& data, double bound) {
  const std::size_t count = data.size();
  if (count < 2) throw Error("invalid-input", "need at least two samples");
  const auto n = static_cast<std::size_t>(data.dim());
  const double* rows = data.unit_rows().data();

  if (count <= 10000) {
    const int threads = parallel::thread_count();
    std::uint64_t good = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : good) num_threads(threads)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
      const double* a = rows + static_cast<std::size_t>(i) * n;
      std::uint64_t local = 0;
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < count; ++j) {
        double dot = 0.0;
        const double* b = rows + j * n;
        for (std::size_t d = 0; d < n; ++d) dot += a[d] * b[d];
        local += dot <= bound;
      }
      good += local;
    }
    (void)threads;
    const double total = 0.5 * static_cast<double>(count) * static_cast<double>(count - 1);
    return static_cast<double>(good) / total;
  }

  // Large N: a fixed number of uniformly random pairs, fixed internal seed.
  constexpr std::size_t kPairs = 1000000;
  RandomStream rng(0x9C0FFEE1u ^ count);
  std::uint64_t good = 0;
  for (std::size_t s = 0; s < kPairs; ++s) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(count));
    std::size_t j = i;
    while (j == i)
      j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(count));
    double dot = 0.0;
    const double* a = rows + std::min(i, static_cast<std::size_t>(count - 1)) * n;
    const double* b = rows + std::min(j, static_cast<std::size_t>(count - 1)) * n;
    for (std::size_t d = 0; d < n; ++d) dot += a[d] * b[d];
    good += dot <= bound;
  }
  return static_cast<double>(good) / static_cast<double>(kPairs);
}

std::vector<double> default_t_grid(double length, double step) {
  if (!(length > 0.0) || !(step > 0.0))
    throw Error("invalid-input", "grid length and step must be positive");
  std::vector<double> grid;
  for (double t = 0.0; t < length - 1e-12; t += step) grid.push_back(t);
  grid.push_back(length);
  return grid;
}

double default_certificate_length(Eigen::Index n) {
  return 0.3 * std::sqrt(static_cast<double>(n));
}

}  // namespace sg
