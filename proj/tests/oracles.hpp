// Test-only oracles, independent of the library implementation paths they
// are used to check.

#ifndef SG_TESTS_ORACLES_HPP
#define SG_TESTS_ORACLES_HPP

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <functional>

namespace oracles {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse CDF by bisection.
inline double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson rule on [a, b] with `pairs` interval pairs.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int pairs = 20000) {
  const double h = (b - a) / (2.0 * pairs);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * pairs; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Uniform measure of a spherical cap of Euclidean radius rho on S^{n-1}:
// sigma({u : |u - e| <= rho}) with s = 1 - rho^2/2 >= 0.
inline double sphere_cap_measure(int n, double rho) {
  const double s = 1.0 - rho * rho / 2.0;
  const double x = (1.0 - s) * (1.0 + s);
  return 0.5 * boost::math::ibeta((n - 1) / 2.0, 0.5, x);
}

// Standard deviation of an empirical frequency at p over N draws.
inline double binomial_sd(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

// Kolmogorov-Smirnov statistic of sorted values against a CDF.
template <typename Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf cdf) {
  double d = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double c = cdf(sorted[i]);
    d = std::max(d, std::abs(c - static_cast<double>(i) / n));
    d = std::max(d, std::abs(c - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace oracles

#endif  // SG_TESTS_ORACLES_HPP
