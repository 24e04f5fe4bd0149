#ifndef SG_EFFECTIVE_RANK_HPP
#define SG_EFFECTIVE_RANK_HPP

#include <cstdint>

#include "sg/distributions.hpp"
#include "sg/geometry.hpp"
#include "sg/rng.hpp"

namespace sg {

// Result of the exact effective-rank search on a finite-support law:
// d_star = min over candidate subspaces E of dim(E) / P(X in E), together
// with a witness achieving it. boundary_equality records whether the
// equality case is admissible at the witness (a complement F with
// E + F = R^n direct and P(X in E u F) = 1 exists); false means the law is
// of class >= d_star - eps for every eps but not of class >= d_star.
struct EffectiveRankReport {
  double d_star = 0.0;
  Subspace witness;
  bool boundary_equality = false;
  std::int64_t checked_subspace_count = 0;
};

// Total weight of samples lying in E, up to relative distance tol.
double subspace_mass(const Dataset& data, const Subspace& E, double tol = 1e-9);

// Exhaustive search over spans of subsets of distinct atom directions (plus
// the full space). Bounded to <= 20 distinct directions and ambient
// dimension <= 6; ties are broken by subset enumeration order, and the
// equality clause is AND-ed over all tying subspaces.
EffectiveRankReport effective_rank_exact(const Dataset& atoms);

// Whether P(X in E) <= dim(E)/d holds for every candidate subspace, with
// the equality-only-if-complement clause enforced.
bool effrank_at_least(const Dataset& atoms, double d);

// Projection of every sample onto a uniformly random ceil(d)-dimensional
// subspace, returned in the coordinates of that subspace.
Dataset random_projection_reduce(const Dataset& data, double d, RandomStream& rng);

// Same, keeping the subspace so callers can pull directions back to the
// original coordinates.
struct ProjectionReduction {
  Dataset data;
  Subspace subspace;
};
ProjectionReduction random_projection_reduce_with_basis(const Dataset& data, double d,
                                                        RandomStream& rng);

}  // namespace sg

#endif  // SG_EFFECTIVE_RANK_HPP
