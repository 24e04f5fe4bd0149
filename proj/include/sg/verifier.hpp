#ifndef SG_VERIFIER_HPP
#define SG_VERIFIER_HPP

#include <optional>
#include <utility>
#include <vector>

#include "sg/distributions.hpp"
#include "sg/geometry.hpp"

namespace sg {

// Empirical two-sided tail frequencies of Y = <X, theta> in units of the
// median of |Y|, with one-sided 95% Wilson lower confidence bounds attached
// to the smaller tail at each grid point. Tail counts use strict
// inequalities so that exact zeros shrink both tails.
struct TailCurve {
  std::vector<double> t_grid;
  std::vector<double> upper;  // P(Y >  t * M_med)
  std::vector<double> lower;  // P(Y < -t * M_med)
  std::vector<double> ci_lower_bounds;
  std::size_t sample_count = 0;

  double min_tail(std::size_t g) const { return std::min(upper[g], lower[g]); }
};

// Pass/fail record for the two-sided tail lower bound
//   min{ P(Y >= t M), P(Y <= -t M) } >= alpha * exp(-t^2 / beta),  0 <= t <= L,
// evaluated on the curve's grid against the Wilson lower bounds.
struct SuperGaussianCertificate {
  double alpha = 0.0;
  double beta = 0.0;
  double length = 0.0;            // L, in median units
  double median_abs_value = 0.0;  // M_med
  bool pass = false;
  std::optional<double> failing_t;
};

// Weighted lower median of { |<x_i, theta>| }.
double median_abs(const Dataset& data, const UnitVector& theta);

// Exact empirical tail curve on an increasing grid starting at 0.
TailCurve tail_curve(const Dataset& data, const UnitVector& theta, double m_med,
                     const std::vector<double>& t_grid);

SuperGaussianCertificate certify(const TailCurve& curve, double alpha, double beta,
                                 double length, double m_med = 0.0);

// Least-squares fit of (alpha, beta) to the curve's lower confidence bounds:
// beta from the slope of ln(ci_lb) against -t^2, alpha floored so that
// certify() of the result passes on the same curve by construction.
std::pair<double, double> fit_parameters(const TailCurve& curve, double length);

// median_abs(data, theta) <= 6 M / sqrt(n). Meaningful when the law is
// sub-isotropic with parameter n/5 and M is the 1/3-quantile of |X|.
bool median_bound_check(const Dataset& data, const UnitVector& theta, double M);

// Exact binomial check that S ~ Bin(N, p) satisfies
// P(S >= N / (3k)) >= 1 - 2 (1-p)^k. The hypothesis behind it is that any
// k of the indicators fire jointly with probability >= 1 - (1-p)^k, which
// holds with equality for independent Bernoulli variables.
bool check_binomial_count_bound(int N, int k, double p);

// Fraction of sample pairs whose normalized inner product is <= bound.
// Exact over all pairs up to 10^4 samples, sampled (10^6 pairs) beyond.
double pairwise_cosine_check(const Dataset& data, double bound);

// Grid {0, step, 2 step, ...} up to and including `length`.
std::vector<double> default_t_grid(double length, double step = 0.25);

// Default certification length 0.3 sqrt(n), a calibrated working value.
double default_certificate_length(Eigen::Index n);

}  // namespace sg

#endif  // SG_VERIFIER_HPP
