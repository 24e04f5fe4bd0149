#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sg/effective_rank.hpp"
#include "sg/error.hpp"
#include "sg/isotropy.hpp"

using sg::Dataset;
using sg::RowMatrix;

namespace {

Dataset two_atoms_2d() {
  RowMatrix m(2, 2);
  m << 1, 0, 0, 1;
  return Dataset(m, {2.0 / 3.0, 1.0 / 3.0});
}

Dataset coordinate_atoms(int n) {
  RowMatrix m = RowMatrix::Identity(n, n);
  return Dataset(m);
}

}  // namespace

TEST_CASE("subspace_mass basics") {
  const Dataset d = two_atoms_2d();
  CHECK(sg::subspace_mass(d, sg::Subspace::full(2)) == 1.0);
  CHECK(sg::subspace_mass(d, sg::Subspace::zero(2)) == 0.0);
  Eigen::MatrixXd axis(2, 1);
  axis << 1, 0;
  CHECK(sg::subspace_mass(d, sg::Subspace(2, axis)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("two weighted atoms in the plane") {
  const sg::EffectiveRankReport report = sg::effective_rank_exact(two_atoms_2d());
  CHECK(report.d_star == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(report.witness.dim() == 1);
  CHECK(std::abs(report.witness.basis()(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.boundary_equality);  // the complementary axis carries the rest
  CHECK(report.checked_subspace_count == 4);  // 3 atom-subset spans + full space
}

TEST_CASE("uniform coordinate atoms have full effective rank") {
  const sg::EffectiveRankReport report = sg::effective_rank_exact(coordinate_atoms(3));
  CHECK(report.d_star == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(report.boundary_equality);
}

TEST_CASE("atoms confined to a plane of R^3") {
  RowMatrix m(3, 3);
  m << 1, 0, 0, 0, 1, 0, std::sqrt(0.5), std::sqrt(0.5), 0;
  const sg::EffectiveRankReport report = sg::effective_rank_exact(Dataset(m));
  CHECK(report.d_star == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(report.witness.dim() == 2);
  // the witness is the coordinate plane: no mass outside it
  CHECK(sg::subspace_mass(Dataset(m), report.witness) == 1.0);
  CHECK(report.boundary_equality);
}

TEST_CASE("equality clause can fail: a tying subspace without a complement") {
  RowMatrix m(3, 2);
  m << 1, 0, 0, 1, std::sqrt(0.5), std::sqrt(0.5);
  const Dataset d(m, {0.5, 0.25, 0.25});
  const sg::EffectiveRankReport report = sg::effective_rank_exact(d);
  CHECK(report.d_star == doctest::Approx(2.0).epsilon(1e-12));
  // span(e1) carries mass 1/2 = 1/d_star, but the remaining atoms span the
  // whole plane, so no direct complement exists
  CHECK_FALSE(report.boundary_equality);
  CHECK_FALSE(sg::effrank_at_least(d, 2.0));
  CHECK(sg::effrank_at_least(d, 1.999));
}

TEST_CASE("effrank_at_least flips exactly at the documented points") {
  const Dataset d = two_atoms_2d();
  CHECK(sg::effrank_at_least(d, 1.5));
  CHECK_FALSE(sg::effrank_at_least(d, 1.6));
  CHECK_FALSE(sg::effrank_at_least(d, 2.5));  // no law beats its dimension
  CHECK_THROWS_AS(sg::effrank_at_least(d, 0.0), sg::Error);
}

TEST_CASE("combinatorial envelope is enforced") {
  RowMatrix m = RowMatrix::Identity(7, 7);
  try {
    sg::effective_rank_exact(Dataset(m));
    FAIL("expected combinatorial-budget");
  } catch (const sg::Error& e) {
    CHECK(e.code() == "combinatorial-budget");
  }
}

TEST_CASE("random atoms in general position have full effective rank") {
  sg::RandomStream rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 3);  // 2..4
    const int count = n + static_cast<int>(rng.uniform01() * (9 - n));
    RowMatrix m(count, n);
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
    const sg::EffectiveRankReport report = sg::effective_rank_exact(Dataset(m));
    CHECK(report.d_star == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("adding an atom inside the witness never raises d_star") {
  sg::RandomStream rng(19);
  for (int trial = 0; trial < 25; ++trial) {
    RowMatrix m(4, 3);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
    const Dataset base(m);
    const sg::EffectiveRankReport before = sg::effective_rank_exact(base);

    // duplicate a direction already inside the witness span
    RowMatrix extended(5, 3);
    extended.topRows(4) = m;
    extended.row(4) = 0.5 * m.row(0);
    const sg::EffectiveRankReport after = sg::effective_rank_exact(Dataset(extended));
    CHECK(after.d_star <= before.d_star + 1e-12);
  }
}

TEST_CASE("random projection with d = n is an isometry") {
  sg::RandomStream rng(23);
  RowMatrix m(6, 4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = rng.normal();
  const Dataset d(m);
  sg::RandomStream proj_rng(5);
  const Dataset image = sg::random_projection_reduce(d, 4.0, proj_rng);
  REQUIRE(image.dim() == 4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(image.samples().row(i).dot(image.samples().row(j)) ==
            doctest::Approx(m.row(i).dot(m.row(j))).epsilon(1e-10));
}

TEST_CASE("projection of the weighted atoms keeps d_star = 1.5") {
  RowMatrix m(2, 3);
  m << 1, 0, 0, 0, 1, 0;
  const Dataset atoms(m, {2.0 / 3.0, 1.0 / 3.0});
  sg::RandomStream rng(41);
  const Dataset image = sg::random_projection_reduce(atoms, 2.0, rng);
  REQUIRE(image.dim() == 2);
  CHECK(image.norms().minCoeff() > 0.0);
  const sg::EffectiveRankReport report = sg::effective_rank_exact(image);
  CHECK(report.d_star == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("projection is reproducible per seed and validates d") {
  RowMatrix m(3, 3);
  m << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  const Dataset d(m);
  sg::RandomStream a(3), b(3);
  const Dataset ia = sg::random_projection_reduce(d, 2.0, a);
  const Dataset ib = sg::random_projection_reduce(d, 2.0, b);
  CHECK((ia.samples() - ib.samples()).norm() == 0.0);
  sg::RandomStream c(3);
  CHECK_THROWS_AS(sg::random_projection_reduce(d, 0.0, c), sg::Error);
  CHECK_THROWS_AS(sg::random_projection_reduce(d, 4.0, c), sg::Error);
}

TEST_CASE("projections of a full-rank atom set keep full rank in the image") {
  const Dataset atoms = coordinate_atoms(3);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    sg::RandomStream rng(seed);
    const Dataset image = sg::random_projection_reduce(atoms, 2.0, rng);
    const sg::EffectiveRankReport report = sg::effective_rank_exact(image);
    CHECK(report.d_star >= 2.0 * (1.0 - 1e-12));
  }
}

TEST_CASE("sub-isotropy of the image bounds the effective rank from below") {
  sg::RandomStream rng(31);
  int converged_cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    RowMatrix m(7, 3);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
    const Dataset atoms(m);
    const sg::IsotropyTransform transform = sg::isotropize(atoms, 1e-6, 2000);
    if (!transform.converged) continue;
    ++converged_cases;
    const Dataset image = sg::apply_transform(transform, atoms);
    const Eigen::MatrixXd cov = sg::angular_covariance(image).matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double certified_d = 1.0 / eig.eigenvalues().maxCoeff();
    const sg::EffectiveRankReport report = sg::effective_rank_exact(image);
    CHECK(report.d_star >= certified_d - 1e-9);
  }
  CHECK(converged_cases > 0);
}
