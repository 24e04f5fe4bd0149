#include "sg/effective_rank.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sg/error.hpp"

namespace sg {

namespace {

constexpr double kMembershipTol = 1e-9;   // relative distance for "x in E"
constexpr double kDirectionTol = 1e-9;    // distinctness of atom directions
constexpr int kMaxDistinct = 20;          // brute-force envelope
constexpr int kMaxAmbient = 6;

struct DistinctDirections {
  Eigen::MatrixXd dirs;           // n x m unit columns
  std::vector<double> masses;     // aggregated weight per direction
};

DistinctDirections collect_directions(const Dataset& data) {
  DistinctDirections out;
  const Eigen::Index n = data.dim();
  std::vector<Eigen::VectorXd> dirs;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd u = data.unit_rows().row(static_cast<Eigen::Index>(i)).transpose();
    bool merged = false;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if ((dirs[j] - u).norm() < kDirectionTol) {
        out.masses[j] += data.weight(i);
        merged = true;
        break;
      }
    }
    if (!merged) {
      dirs.push_back(u);
      out.masses.push_back(data.weight(i));
    }
  }
  out.dirs.resize(n, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j)
    out.dirs.col(static_cast<Eigen::Index>(j)) = dirs[j];
  return out;
}

void check_envelope(const Dataset& data, const DistinctDirections& dd) {
  if (data.dim() > kMaxAmbient || dd.dirs.cols() > kMaxDistinct)
    throw Error("combinatorial-budget",
                "exact search is limited to <= " + std::to_string(kMaxDistinct) +
                    " distinct directions in dimension <= " + std::to_string(kMaxAmbient) +
                    "; reduce the law first (random_projection_reduce / subsampling)");
}

// Orthonormal basis of the span of the selected columns.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& dirs, std::uint32_t mask) {
  const Eigen::Index n = dirs.rows();
  Eigen::MatrixXd basis(n, std::popcount(mask));
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
    if (!(mask & (1u << j))) continue;
    Eigen::VectorXd v = dirs.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < rank; ++p) v -= basis.col(p).dot(v) * basis.col(p);
    const double norm = v.norm();
    if (norm > kDirectionTol) basis.col(rank++) = v / norm;
  }
  return basis.leftCols(rank);
}

bool dir_in_span(const Eigen::MatrixXd& basis, const Eigen::VectorXd& u) {
  if (basis.cols() == 0) return false;
  return (u - basis * (basis.transpose() * u)).norm() <= kMembershipTol;
}

double span_mass(const Eigen::MatrixXd& basis, const DistinctDirections& dd) {
  if (basis.cols() == dd.dirs.rows()) return 1.0;
  double mass = 0.0;
  for (Eigen::Index j = 0; j < dd.dirs.cols(); ++j)
    if (dir_in_span(basis, dd.dirs.col(j))) mass += dd.masses[static_cast<std::size_t>(j)];
  return mass;
}

// Equality admissibility: some F with E + F = R^n direct and all mass in
// E u F. The minimal candidate is F0 = span of the directions outside E;
// any extension to a complement works iff F0 is independent of E and
// dim(E) + dim(F0) <= n.
bool equality_admissible(const Eigen::MatrixXd& basis_e, const DistinctDirections& dd) {
  const Eigen::Index n = dd.dirs.rows();
  const Eigen::Index dim_e = basis_e.cols();
  std::vector<Eigen::Index> outside;
  for (Eigen::Index j = 0; j < dd.dirs.cols(); ++j)
    if (!dir_in_span(basis_e, dd.dirs.col(j))) outside.push_back(j);

  // Rank of F0 alone.
  Eigen::MatrixXd f_basis(n, static_cast<Eigen::Index>(outside.size()));
  Eigen::Index f_rank = 0;
  for (Eigen::Index j : outside) {
    Eigen::VectorXd v = dd.dirs.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < f_rank; ++p)
        v -= f_basis.col(p).dot(v) * f_basis.col(p);
    const double norm = v.norm();
    if (norm > kDirectionTol) f_basis.col(f_rank++) = v / norm;
  }
  if (dim_e + f_rank > n) return false;

  // Independence: rank(E u F0) must equal dim(E) + dim(F0).
  Eigen::MatrixXd joint(n, dim_e + f_rank);
  joint.leftCols(dim_e) = basis_e;
  Eigen::Index joint_rank = dim_e;
  for (Eigen::Index q = 0; q < f_rank; ++q) {
    Eigen::VectorXd v = f_basis.col(q);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < joint_rank; ++p)
        v -= joint.col(p).dot(v) * joint.col(p);
    const double norm = v.norm();
    if (norm <= kDirectionTol) return false;
    joint.col(joint_rank++) = v / norm;
  }
  return true;
}

struct Candidate {
  Eigen::MatrixXd basis;
  double mass = 0.0;
  double ratio = std::numeric_limits<double>::infinity();
};

// All candidate subspaces in deterministic order: spans of direction
// subsets by ascending bitmask, then the full space.
std::vector<Candidate> enumerate_candidates(const Dataset& data,
                                            const DistinctDirections& dd) {
  const Eigen::Index n = data.dim();
  const int m = static_cast<int>(dd.dirs.cols());
  std::vector<Candidate> out;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    if (std::popcount(mask) > static_cast<int>(n)) continue;
    Candidate c;
    c.basis = span_basis(dd.dirs, mask);
    c.mass = span_mass(c.basis, dd);
    if (c.mass > 0.0) c.ratio = static_cast<double>(c.basis.cols()) / c.mass;
    out.push_back(std::move(c));
  }
  Candidate full;
  full.basis = Eigen::MatrixXd::Identity(n, n);
  full.mass = 1.0;
  full.ratio = static_cast<double>(n);
  out.push_back(std::move(full));
  return out;
}

}  // namespace

double subspace_mass(const Dataset& data, const Subspace& E, double tol) {
  if (E.ambient_dim() != data.dim())
    throw Error("invalid-dimension", "subspace and dataset dimensions differ");
  if (E.dim() == data.dim()) return 1.0;
  double mass = 0.0;
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd x = data.samples().row(static_cast<Eigen::Index>(i)).transpose();
    const double residual =
        E.dim() == 0 ? x.norm() : (x - E.basis() * (E.basis().transpose() * x)).norm();
    if (residual <= tol * data.norms()[static_cast<Eigen::Index>(i)]) {
      if (data.uniform_weights())
        ++hits;
      else
        mass += data.weight(i);
    }
  }
  return data.uniform_weights() ? static_cast<double>(hits) * data.uniform_weight() : mass;
}

EffectiveRankReport effective_rank_exact(const Dataset& atoms) {
  const DistinctDirections dd = collect_directions(atoms);
  check_envelope(atoms, dd);
  const std::vector<Candidate> candidates = enumerate_candidates(atoms, dd);

  double d_star = std::numeric_limits<double>::infinity();
  std::size_t witness_index = candidates.size() - 1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].ratio < d_star * (1.0 - 1e-12)) {
      d_star = candidates[i].ratio;
      witness_index = i;
    }
  }

  bool equality_ok = true;
  for (const Candidate& c : candidates)
    if (c.ratio <= d_star * (1.0 + 1e-9))
      equality_ok = equality_ok && equality_admissible(c.basis, dd);

  EffectiveRankReport report;
  report.d_star = d_star;
  report.witness = Subspace(atoms.dim(), candidates[witness_index].basis);
  report.boundary_equality = equality_ok;
  report.checked_subspace_count = static_cast<std::int64_t>(candidates.size());
  return report;
}

bool effrank_at_least(const Dataset& atoms, double d) {
  if (!(d > 0.0)) throw Error("invalid-input", "d must be positive");
  const DistinctDirections dd = collect_directions(atoms);
  check_envelope(atoms, dd);
  for (const Candidate& c : enumerate_candidates(atoms, dd)) {
    const double bound = static_cast<double>(c.basis.cols()) / d;
    if (c.mass > bound + 1e-12) return false;
    if (c.mass >= bound - 1e-12 && !equality_admissible(c.basis, dd)) return false;
  }
  return true;
}

ProjectionReduction random_projection_reduce_with_basis(const Dataset& data, double d,
                                                        RandomStream& rng) {
  if (!(d > 0.0)) throw Error("invalid-input", "target dimension must be positive");
  if (d > static_cast<double>(data.dim()))
    throw Error("invalid-dimension", "target dimension exceeds ambient dimension");
  const Eigen::Index m = static_cast<Eigen::Index>(std::ceil(d - 1e-12));
  Subspace L = sample_grassmannian(rng, data.dim(), m);
  RowMatrix reduced = data.samples() * L.basis();
  std::vector<double> weights;
  if (!data.uniform_weights()) {
    weights.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) weights[i] = data.weight(i);
  }
  return ProjectionReduction{Dataset(std::move(reduced), std::move(weights)), std::move(L)};
}

Dataset random_projection_reduce(const Dataset& data, double d, RandomStream& rng) {
  return random_projection_reduce_with_basis(data, d, rng).data;
}

}  // namespace sg
