#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sg/direction.hpp"
#include "sg/distributions.hpp"
#include "sg/error.hpp"
#include "sg/isotropy.hpp"
#include "sg/verifier.hpp"

using sg::Dataset;
using sg::RowMatrix;
using sg::TailCurve;
using sg::UnitVector;

namespace {

UnitVector first_axis(int n) { return UnitVector(Eigen::VectorXd::Unit(n, 0)); }

TailCurve synthetic_curve(const std::vector<double>& grid, double alpha, double beta) {
  TailCurve curve;
  curve.t_grid = grid;
  for (double t : grid) {
    const double v = alpha * std::exp(-t * t / beta);
    curve.upper.push_back(v);
    curve.lower.push_back(v);
    curve.ci_lower_bounds.push_back(v);
  }
  curve.sample_count = 1000000;
  return curve;
}

}  // namespace

TEST_CASE("median of |projections| on small profiles") {
  RowMatrix m(3, 2);
  m << 1, 0, 2, 0, 3, 0;
  CHECK(sg::median_abs(Dataset(m), first_axis(2)) == 2.0);

  RowMatrix zeros(2, 2);
  zeros << 0, 1, 0, -1;
  CHECK_THROWS_AS(sg::median_abs(Dataset(zeros), first_axis(2)), sg::Error);
}

TEST_CASE("median of |N(0,1)| matches the quantile oracle") {
  const std::size_t count = 1000000;
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(2), 31, count);
  const double med = sg::median_abs(d, first_axis(2));
  const double exact = oracles::normal_quantile(0.75);
  // sd of the sample median of |Y|: 0.5 / (density of |Y| at the median sqrt(N))
  const double density =
      2.0 * std::exp(-exact * exact / 2.0) / std::sqrt(2.0 * std::numbers::pi);
  const double sd = 0.5 / (density * std::sqrt(static_cast<double>(count)));
  CHECK(std::abs(med - exact) <= 3.0 * sd);
}

TEST_CASE("median of the ball marginal matches the tail-inversion oracle") {
  const int n = 50;
  const std::size_t count = 200000;
  const Dataset d = sg::sample(sg::SourceSpec::uniform_ball(n, 1.0), 77, count);
  const sg::BallMarginal marginal{n, 1.0 / std::sqrt(static_cast<double>(n))};
  // solve tail(m) = 1/4 by bisection on the exact oracle
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sg::ball_marginal_tail(marginal, mid) > 0.25 ? lo : hi) = mid;
  }
  const double exact = 0.5 * (lo + hi);
  CHECK(sg::ball_marginal_tail(marginal, exact) == doctest::Approx(0.25).epsilon(1e-9));

  const double med = sg::median_abs(d, first_axis(n));
  const double density = 2.0 * sg::ball_marginal_pdf(marginal, exact);
  const double sd = 0.5 / (density * std::sqrt(static_cast<double>(count)));
  CHECK(std::abs(med - exact) <= 3.0 * sd);
}

TEST_CASE("tail curve of a symmetrized dataset is exactly two-sided") {
  const Dataset half = sg::sample(sg::SourceSpec::gaussian(3), 7, 2000);
  RowMatrix sym(4000, 3);
  sym.topRows(2000) = half.samples();
  sym.bottomRows(2000) = -half.samples();
  const Dataset d(sym);
  const UnitVector theta = first_axis(3);
  const double med = sg::median_abs(d, theta);
  const TailCurve curve = sg::tail_curve(d, theta, med, sg::default_t_grid(2.0, 0.25));
  for (std::size_t g = 0; g < curve.t_grid.size(); ++g) {
    CHECK(curve.upper[g] == curve.lower[g]);
    CHECK(curve.ci_lower_bounds[g] <= curve.min_tail(g));
  }
  CHECK(curve.upper[0] + curve.lower[0] == 1.0);  // no exact zeros
  for (std::size_t g = 1; g < curve.t_grid.size(); ++g) {
    CHECK(curve.upper[g] <= curve.upper[g - 1]);
    CHECK(curve.lower[g] <= curve.lower[g - 1]);
  }
}

TEST_CASE("gaussian tail at t = 2 in median units") {
  const std::size_t count = 1000000;
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(2), 13, count);
  const UnitVector theta = first_axis(2);
  const double med = sg::median_abs(d, theta);
  const TailCurve curve = sg::tail_curve(d, theta, med, {0.0, 1.0, 2.0});
  const double expected = oracles::normal_cdf(-2.0 * oracles::normal_quantile(0.75));
  const double sd = oracles::binomial_sd(expected, static_cast<double>(count));
  // the empirical median adds scale noise on top of the binomial band
  CHECK(std::abs(curve.min_tail(2) - expected) <= 5.0 * sd);
}

TEST_CASE("certify passes and fails as dictated by the bound") {
  const std::vector<double> grid = sg::default_t_grid(2.0, 0.5);
  const TailCurve curve = synthetic_curve(grid, 0.4, 4.0);

  CHECK(sg::certify(curve, 1e-6, 4.0, 2.0).pass);
  CHECK(sg::certify(curve, 0.4, 4.0, 2.0).pass);  // exactly on the curve

  const sg::SuperGaussianCertificate fail = sg::certify(curve, 1.0, 8.0, 2.0);
  CHECK_FALSE(fail.pass);
  REQUIRE(fail.failing_t.has_value());
  CHECK(*fail.failing_t == 0.0);  // 0.4 < 1.0 already at t = 0

  CHECK_THROWS_AS(sg::certify(curve, 0.1, 0.0, 2.0), sg::Error);
}

TEST_CASE("alpha = 1 cannot be certified on real data") {
  const Dataset d = sg::sample(sg::SourceSpec::uniform_ball(5, 1.0), 3, 10000);
  const UnitVector theta = first_axis(5);
  const double med = sg::median_abs(d, theta);
  const TailCurve curve = sg::tail_curve(d, theta, med, sg::default_t_grid(1.0, 0.25));
  const sg::SuperGaussianCertificate cert = sg::certify(curve, 1.0, 100.0, 1.0, med);
  CHECK_FALSE(cert.pass);
  CHECK(*cert.failing_t == 0.0);  // tails are at most 1/2
}

TEST_CASE("fit recovers exact parameters and handles flat curves") {
  const std::vector<double> grid = sg::default_t_grid(3.0, 0.25);
  const auto [alpha, beta] = sg::fit_parameters(synthetic_curve(grid, 0.35, 2.5), 3.0);
  CHECK(alpha == doctest::Approx(0.35).epsilon(1e-9));
  CHECK(beta == doctest::Approx(2.5).epsilon(1e-9));

  TailCurve flat = synthetic_curve(grid, 0.3, 1.0);
  for (auto& v : flat.ci_lower_bounds) v = 0.3;
  for (auto& v : flat.upper) v = 0.3;
  for (auto& v : flat.lower) v = 0.3;
  const auto [fa, fb] = sg::fit_parameters(flat, 3.0);
  CHECK(fb == 1e6);
  CHECK(fa == doctest::Approx(0.3).epsilon(1e-12));

  TailCurve tiny = synthetic_curve({0.0, 0.5}, 0.3, 1.0);
  CHECK_THROWS_AS(sg::fit_parameters(tiny, 3.0), sg::Error);
}

TEST_CASE("fitted certificates pass on their own curve") {
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(4), 17, 200000);
  const UnitVector theta = first_axis(4);
  const double med = sg::median_abs(d, theta);
  const TailCurve curve = sg::tail_curve(d, theta, med, sg::default_t_grid(3.0, 0.25));
  const auto [alpha, beta] = sg::fit_parameters(curve, 3.0);
  CHECK(beta >= 1.5);
  CHECK(beta <= 6.0);
  CHECK(sg::certify(curve, alpha, beta, 3.0, med).pass);
}

TEST_CASE("pointwise-larger curves inherit passing certificates") {
  const std::vector<double> grid = sg::default_t_grid(2.0, 0.25);
  const TailCurve small = synthetic_curve(grid, 0.2, 3.0);
  TailCurve big = small;
  for (auto& v : big.ci_lower_bounds) v *= 1.1;
  const sg::SuperGaussianCertificate pass_small = sg::certify(small, 0.15, 3.5, 2.0);
  REQUIRE(pass_small.pass);
  CHECK(sg::certify(big, 0.15, 3.5, 2.0).pass);
}

TEST_CASE("median bound check arithmetic") {
  RowMatrix one(1, 1);
  one << 2.0;
  const Dataset d1(one);
  CHECK(sg::median_bound_check(d1, UnitVector(Eigen::VectorXd::Ones(1)), 2.0));

  RowMatrix tall(1, 100);
  tall.setZero();
  tall(0, 0) = 2.0;
  const Dataset d100(tall);
  // median 2 > 6 * 2 / 10: the sub-isotropy precondition really is needed
  CHECK_FALSE(sg::median_bound_check(d100, first_axis(100), 2.0));
}

TEST_CASE("median bound holds on repositioned ball data") {
  const int n = 20;
  const Dataset d = sg::sample(sg::SourceSpec::uniform_ball(n, 1.0), 5, 20000);
  const sg::IsotropyTransform t = sg::isotropize(d);
  REQUIRE(t.converged);
  const Dataset image = sg::apply_transform(t, d);
  REQUIRE(sg::verify_subisotropic(image, n / 5.0));
  const double m = sg::third_quantile(image);
  sg::RandomStream rng(2);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(sg::median_bound_check(image, sg::sample_sphere(rng, n), m));
}

TEST_CASE("binomial count bound: documented grid and edge cases") {
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(sg::check_binomial_count_bound(12, 12, p));  // k = N reduces to algebra
  }
  CHECK(sg::check_binomial_count_bound(10, 3, 1.0));
  CHECK(sg::check_binomial_count_bound(10, 3, 0.0));
  for (int N = 6; N <= 12; ++N)
    for (int k = 1; k <= 4; ++k)
      for (int tenth = 1; tenth <= 9; ++tenth)
        CHECK(sg::check_binomial_count_bound(N, k, tenth / 10.0));
  CHECK_THROWS_AS(sg::check_binomial_count_bound(30, 1, 0.5), sg::Error);
}

TEST_CASE("pairwise cosine fraction") {
  const Dataset ortho(RowMatrix(RowMatrix::Identity(4, 4)));
  CHECK(sg::pairwise_cosine_check(ortho, 49.0 / 50.0) == 1.0);

  RowMatrix dup(3, 4);
  dup.setZero();
  dup(0, 0) = 1.0;
  dup(1, 0) = 2.0;  // same direction as row 0
  dup(2, 1) = 1.0;
  CHECK(sg::pairwise_cosine_check(Dataset(dup), 49.0 / 50.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const Dataset sphere = sg::sample(sg::SourceSpec::gaussian(50), 41, 1000);
  CHECK(sg::pairwise_cosine_check(sphere, 49.0 / 50.0) == 1.0);
}

TEST_CASE("empirical min-tails dominate the exact ball marginal band") {
  const int n = 10;
  const std::size_t count = 20000;
  const Dataset d = sg::sample(sg::SourceSpec::uniform_ball(n, 1.0), 19, count);
  const UnitVector theta = first_axis(n);
  const double med = sg::median_abs(d, theta);
  const sg::BallMarginal marginal{n, 1.0 / std::sqrt(static_cast<double>(n))};
  const TailCurve curve = sg::tail_curve(d, theta, med, sg::default_t_grid(1.5, 0.25));
  for (std::size_t g = 0; g < curve.t_grid.size(); ++g) {
    const double expected = sg::ball_marginal_tail(marginal, curve.t_grid[g] * med);
    const double sd = oracles::binomial_sd(expected, static_cast<double>(count));
    CHECK(std::abs(curve.min_tail(g) - expected) <= 4.0 * sd + 1e-12);
  }
}

TEST_CASE("grid construction") {
  const std::vector<double> grid = sg::default_t_grid(2.1213, 0.25);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 2.1213);
  CHECK(grid.size() == 10);  // 0, 0.25, ..., 2.0, then the endpoint
  CHECK_THROWS_AS(sg::default_t_grid(0.0, 0.25), sg::Error);
  CHECK(sg::default_certificate_length(50) == doctest::Approx(0.3 * std::sqrt(50.0)));
}
