#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sg/distributions.hpp"
#include "sg/error.hpp"
#include "sg/geometry.hpp"
#include "sg/isotropy.hpp"

using sg::Dataset;
using sg::RowMatrix;
using sg::UnitVector;

namespace {

Dataset cross_atoms() {  // {+-e1, +-e2} uniform
  RowMatrix m(4, 2);
  m << 1, 0, -1, 0, 0, 1, 0, -1;
  return Dataset(m);
}

Dataset stretched_cross_atoms() {  // {+-10 e1, +-e2} uniform
  RowMatrix m(4, 2);
  m << 10, 0, -10, 0, 0, 1, 0, -1;
  return Dataset(m);
}

}  // namespace

TEST_CASE("angular second moment extremes") {
  RowMatrix m(3, 4);
  m.setZero();
  m(0, 0) = 2.0;
  m(1, 0) = -1.0;
  m(2, 0) = 0.5;
  const Dataset aligned(m);
  const UnitVector e1(Eigen::VectorXd::Unit(4, 0));
  const UnitVector e2(Eigen::VectorXd::Unit(4, 1));
  CHECK(sg::angular_second_moment(aligned, e1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sg::angular_second_moment(aligned, e2) == 0.0);
}

TEST_CASE("angular second moment of uniform directions is 1/n") {
  const int n = 50;
  const std::size_t count = 100000;
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(n), 2718, count);
  const UnitVector e1(Eigen::VectorXd::Unit(n, 0));
  const double second = sg::angular_second_moment(d, e1);
  const double var =
      3.0 / (static_cast<double>(n) * (n + 2)) - 1.0 / (static_cast<double>(n) * n);
  CHECK(std::abs(second - 1.0 / n) <= 3.0 * std::sqrt(var / static_cast<double>(count)));
}

TEST_CASE("angular covariance closed forms") {
  const sg::AngularCovariance cross = sg::angular_covariance(cross_atoms());
  CHECK((cross.matrix - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-15);

  RowMatrix single(1, 3);
  single << 2, 0, 0;
  const sg::AngularCovariance one = sg::angular_covariance(Dataset(single));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK((one.matrix - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("angular covariance has unit trace and represents the quadratic form") {
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(5), 11, 4000);
  const sg::AngularCovariance cov = sg::angular_covariance(d);
  CHECK(cov.trace_error <= 1e-10);
  sg::RandomStream rng(13);
  for (int t = 0; t < 100; ++t) {
    const UnitVector theta = sg::sample_sphere(rng, 5);
    const double quad = theta.coords().dot(cov.matrix * theta.coords());
    CHECK(quad == doctest::Approx(sg::angular_second_moment(d, theta)).epsilon(1e-12));
  }
}

TEST_CASE("already-isotropic atoms converge immediately to a multiple of I") {
  const sg::IsotropyTransform t = sg::isotropize(cross_atoms());
  CHECK(t.converged);
  CHECK(t.iterations <= 1);
  CHECK(t.residual <= 1e-12);
  CHECK(std::abs(t.matrix(0, 0) - t.matrix(1, 1)) <= 1e-12 * t.matrix(0, 0));
  CHECK(std::abs(t.matrix(0, 1)) <= 1e-12 * t.matrix(0, 0));
}

TEST_CASE("stretched cross atoms: the transform undoes the stretch") {
  const sg::IsotropyTransform t = sg::isotropize(stretched_cross_atoms());
  CHECK(t.converged);
  // A is proportional to diag(1/10, 1)
  CHECK(t.matrix(0, 0) / t.matrix(1, 1) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(std::abs(t.matrix(0, 1)) <= 1e-12 * t.matrix(1, 1));

  const Dataset image = sg::apply_transform(t, stretched_cross_atoms());
  const sg::AngularCovariance cov = sg::angular_covariance(image);
  CHECK((cov.matrix - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("anisotropic gaussian is repositioned to near-isotropy") {
  const int n = 10;
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);
  diag[0] = 100.0;
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(n, diag), 5, 10000);

  // far from isotropic before
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> before(sg::angular_covariance(d).matrix);
  CHECK(n * before.eigenvalues().maxCoeff() >= 5.0);

  const sg::IsotropyTransform t = sg::isotropize(d);
  CHECK(t.converged);
  const Dataset image = sg::apply_transform(t, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> after(sg::angular_covariance(image).matrix);
  CHECK(n * after.eigenvalues().maxCoeff() <= 1.1);
  CHECK(n * after.eigenvalues().maxCoeff() >= 0.9);
}

TEST_CASE("mass past the existence threshold is reported, not forced") {
  RowMatrix m(2, 2);
  m << 1, 0, 0, 1;
  const Dataset d(m, {2.0 / 3.0, 1.0 / 3.0});  // 2/3 > 1/2 on a line
  const sg::IsotropyTransform t = sg::isotropize(d, 0.05, 200);
  CHECK_FALSE(t.converged);
  REQUIRE(t.diagnostic_direction.has_value());
  CHECK(t.diagnostic_direction->size() == 2);
  // the starved direction is e2
  CHECK(std::abs((*t.diagnostic_direction)[1]) >= 0.99);
}

TEST_CASE("verify_subisotropic thresholds") {
  RowMatrix single(1, 2);
  single << 1, 0;
  const Dataset d(single);
  CHECK(sg::verify_subisotropic(d, 1.0));
  CHECK_FALSE(sg::verify_subisotropic(d, 1.01));
  CHECK_THROWS_AS(sg::verify_subisotropic(d, 0.0), sg::Error);

  const Dataset cross = cross_atoms();
  CHECK(sg::verify_subisotropic(cross, 2.0));       // angularly isotropic
  CHECK(sg::verify_subisotropic(cross, 1.0, 0.0));  // weaker parameter also holds
}

TEST_CASE("sub-isotropic with parameter n pins the whole spectrum") {
  // trace 1 and lambda_max <= 1/n + eps force every eigenvalue near 1/n
  const Dataset d = sg::sample(sg::SourceSpec::uniform_ball(6, 1.0), 99, 20000);
  const sg::IsotropyTransform t = sg::isotropize(d, 0.01, 1000);
  REQUIRE(t.converged);
  const Dataset image = sg::apply_transform(t, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sg::angular_covariance(image).matrix);
  const double n = 6.0;
  const double eps = eig.eigenvalues().maxCoeff() - 1.0 / n;
  const double op_dev =
      (sg::angular_covariance(image).matrix - Eigen::MatrixXd::Identity(6, 6) / n)
          .cwiseAbs()
          .maxCoeff();
  CHECK(op_dev <= n * std::max(eps, 0.0) + 1e-12);
}

TEST_CASE("repositioning is scale equivariant") {
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(4), 21, 5000);
  RowMatrix scaled_rows = 7.5 * d.samples();
  const Dataset scaled(scaled_rows);

  const sg::IsotropyTransform t1 = sg::isotropize(d);
  const sg::IsotropyTransform t2 = sg::isotropize(scaled);
  REQUIRE(t1.converged);
  REQUIRE(t2.converged);
  const Eigen::MatrixXd cov1 =
      sg::angular_covariance(sg::apply_transform(t1, d)).matrix;
  const Eigen::MatrixXd cov2 =
      sg::angular_covariance(sg::apply_transform(t2, scaled)).matrix;
  CHECK((cov1 - cov2).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("projected angular mass of any subspace is bounded by its dimension") {
  const Dataset d = sg::sample(sg::SourceSpec::gaussian(6), 33, 3000);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sg::angular_covariance(d).matrix);
  const double lmax = eig.eigenvalues().maxCoeff();
  sg::RandomStream rng(3);
  for (int t = 0; t < 25; ++t) {
    const int k = 1 + static_cast<int>(rng.uniform01() * 5);
    const sg::Subspace E = sg::sample_grassmannian(rng, 6, k);
    double mass = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const Eigen::VectorXd u = d.unit_rows().row(static_cast<Eigen::Index>(i)).transpose();
      mass += d.weight(i) * sg::project(E, u).squaredNorm();
    }
    CHECK(mass <= k * lmax + 1e-12);
  }
}

TEST_CASE("transform matrix is symmetric positive definite") {
  const Dataset d = sg::sample(sg::SourceSpec::product_heavy_tail(5), 8, 20000);
  const sg::IsotropyTransform t = sg::isotropize(d);
  CHECK(t.converged);
  CHECK((t.matrix - t.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::LLT<Eigen::MatrixXd> llt(t.matrix);
  CHECK(llt.info() == Eigen::Success);
}
