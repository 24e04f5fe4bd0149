#ifndef SG_GEOMETRY_HPP
#define SG_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

#include "sg/rng.hpp"

namespace sg {

// Tolerances shared across the geometric types. Two orders of magnitude
// above double-precision accumulation at dimensions up to ~1e4.
inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kOrthoTol = 1e-10;

// A point on the unit sphere. Construction validates the norm.
class UnitVector {
 public:
  explicit UnitVector(Eigen::VectorXd coords);

  // Scales an arbitrary nonzero vector to unit length.
  static UnitVector normalize(const Eigen::VectorXd& v);

  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.size(); }
  double dot(const UnitVector& other) const { return coords_.dot(other.coords_); }

 private:
  Eigen::VectorXd coords_;
};

// A linear subspace given by an orthonormal basis (columns). dim() == 0 is
// the zero subspace with an n x 0 basis.
class Subspace {
 public:
  Subspace() : ambient_dim_(0), basis_(0, 0) {}
  Subspace(Eigen::Index ambient_dim, Eigen::MatrixXd basis);

  static Subspace zero(Eigen::Index ambient_dim);
  static Subspace full(Eigen::Index ambient_dim);

  Eigen::Index ambient_dim() const { return ambient_dim_; }
  Eigen::Index dim() const { return basis_.cols(); }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  Eigen::Index ambient_dim_;
  Eigen::MatrixXd basis_;  // ambient_dim x dim, orthonormal columns
};

// Constants of the selection procedure. All live in (0,1); defaults are the
// working values used throughout the pipeline.
struct SelectionConstants {
  double cap_radius = 0.2;
  double ortho_slack = 0.1;
  double cosine_bound = 49.0 / 50.0;
  double quantile_level = 1.0 / 3.0;

  void validate() const;
};

// Uniform draw from the unit sphere in R^n (normalized Gaussian vector).
UnitVector sample_sphere(RandomStream& rng, Eigen::Index n);

// Uniform draw from the Grassmannian of k-dimensional subspaces of R^n:
// orthonormalized Gaussian n x k matrix, redrawn on numerical rank loss.
Subspace sample_grassmannian(RandomStream& rng, Eigen::Index n, Eigen::Index k);

// Orthogonal projection of v onto E.
Eigen::VectorXd project(const Subspace& E, const Eigen::VectorXd& v);

// Gram-Schmidt smallness test: |proj_{span(v_1..v_{i-1})} v_i| < |v_i| / k^2
// for every i. A sufficient criterion for the tuple being almost orthogonal.
// Order-sensitive by construction.
bool is_almost_orthogonal_system(const std::vector<Eigen::VectorXd>& vectors);

// (t1 - t2 + t3) normalized. The unnormalized combination of unit vectors
// has norm in (0, 3]; a zero combination is reported as an error so the
// caller can resample t3.
UnitVector combine_direction(const UnitVector& t1, const UnitVector& t2,
                             const UnitVector& t3);

// Whether x/|x| lies within Euclidean distance rho of the cap center eta.
bool cap_contains(const UnitVector& eta, const Eigen::VectorXd& x, double rho);

}  // namespace sg

#endif  // SG_GEOMETRY_HPP
