#ifndef SG_ISOTROPY_HPP
#define SG_ISOTROPY_HPP

#include <Eigen/Dense>
#include <optional>

#include "sg/distributions.hpp"
#include "sg/geometry.hpp"

namespace sg {

// A positive-definite change of coordinates A together with convergence
// diagnostics. When converged, the angular covariance of {A x_i} has all
// eigenvalues within tol/n of 1/n.
struct IsotropyTransform {
  Eigen::MatrixXd matrix;  // symmetric positive definite
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  // Populated on failure: the direction of smallest angular mass.
  std::optional<Eigen::VectorXd> diagnostic_direction;
};

// Second-moment matrix of the normalized samples:
// M = sum_i w_i (x_i/|x_i|)(x_i/|x_i|)^T. Trace is 1 up to rounding.
struct AngularCovariance {
  Eigen::MatrixXd matrix;
  double trace_error = 0.0;
};

// E <x/|x|, theta>^2 under the empirical law.
double angular_second_moment(const Dataset& data, const UnitVector& theta);

AngularCovariance angular_covariance(const Dataset& data);

// Fixed-point search for the angularly-isotropic position:
//   Sigma <- n * sum_i w_i x_i x_i^T / (x_i^T Sigma^{-1} x_i),
// trace renormalized to n each step, A = Sigma^{-1/2}. Convergence means
// n * (lambda_max - lambda_min) of the image angular covariance <= tol.
// When mass concentrates on a proper subspace past the existence threshold
// the iteration cannot converge; the best iterate is returned with
// converged = false and the offending direction in the diagnostics.
IsotropyTransform isotropize(const Dataset& data, double tol = 0.05, int max_iter = 500);

// n * lambda_max(angular covariance) <= (n/d) * (1 + slack).
bool verify_subisotropic(const Dataset& data, double d, double slack = 0.0);

// Dataset of {A x_i} with weights preserved.
Dataset apply_transform(const IsotropyTransform& transform, const Dataset& data);

}  // namespace sg

#endif  // SG_ISOTROPY_HPP
