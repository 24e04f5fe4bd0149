#include "sg/geometry.hpp"

#include <cmath>
#include <string>

#include "sg/error.hpp"

namespace sg {

UnitVector::UnitVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (coords_.size() == 0) throw Error("invalid-dimension", "empty vector");
  const double norm = coords_.norm();
  if (std::abs(norm - 1.0) > kUnitNormTol)
    throw Error("not-unit", "norm deviates from 1 by " + std::to_string(norm - 1.0));
}

UnitVector UnitVector::normalize(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw Error("invalid-input", "cannot normalize zero vector");
  return UnitVector(Eigen::VectorXd(v / norm));
}

Subspace::Subspace(Eigen::Index ambient_dim, Eigen::MatrixXd basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (ambient_dim_ < 0 || basis_.cols() > ambient_dim_)
    throw Error("invalid-dimension", "subspace dimension exceeds ambient dimension");
  if (basis_.cols() > 0 && basis_.rows() != ambient_dim_)
    throw Error("invalid-dimension", "basis rows do not match ambient dimension");
  if (basis_.cols() > 0) {
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    const double err =
        (gram - Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
    if (err > kOrthoTol)
      throw Error("not-orthonormal", "basis Gram deviation " + std::to_string(err));
  }
}

Subspace Subspace::zero(Eigen::Index ambient_dim) {
  return Subspace(ambient_dim, Eigen::MatrixXd(ambient_dim, 0));
}

Subspace Subspace::full(Eigen::Index ambient_dim) {
  return Subspace(ambient_dim, Eigen::MatrixXd::Identity(ambient_dim, ambient_dim));
}

void SelectionConstants::validate() const {
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in_unit(cap_radius) || !in_unit(ortho_slack) || !in_unit(cosine_bound) ||
      !in_unit(quantile_level))
    throw Error("invalid-config", "selection constants must lie in (0,1)");
  if (cap_radius * cap_radius >= 2.0)
    throw Error("invalid-config", "cap radius too large for a proper cap");
}

UnitVector sample_sphere(RandomStream& rng, Eigen::Index n) {
  if (n < 1) throw Error("invalid-dimension", "sphere dimension must be >= 1");
  Eigen::VectorXd g(n);
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.normal();
    const double norm = g.norm();
    if (norm > 1e-300) return UnitVector(Eigen::VectorXd(g / norm));
  }
}

Subspace sample_grassmannian(RandomStream& rng, Eigen::Index n, Eigen::Index k) {
  if (k < 1 || k > n) throw Error("invalid-dimension", "need 1 <= k <= n");
  while (true) {
    Eigen::MatrixXd basis(n, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < n; ++i) basis(i, j) = rng.normal();
    // Modified Gram-Schmidt with one re-orthogonalization pass per column.
    bool degenerate = false;
    for (Eigen::Index j = 0; j < k && !degenerate; ++j) {
      Eigen::VectorXd v = basis.col(j);
      const double original_norm = v.norm();
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index p = 0; p < j; ++p) v -= basis.col(p).dot(v) * basis.col(p);
      const double residual = v.norm();
      if (residual < 1e-10 * original_norm || residual < 1e-300) {
        degenerate = true;  // numerical rank < k, redraw the whole matrix
        break;
      }
      basis.col(j) = v / residual;
    }
    if (!degenerate) return Subspace(n, std::move(basis));
  }
}

Eigen::VectorXd project(const Subspace& E, const Eigen::VectorXd& v) {
  if (v.size() != E.ambient_dim())
    throw Error("invalid-dimension", "vector length does not match ambient dimension");
  if (E.dim() == 0) return Eigen::VectorXd::Zero(v.size());
  return E.basis() * (E.basis().transpose() * v);
}

bool is_almost_orthogonal_system(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw Error("invalid-input", "empty system");
  const Eigen::Index n = vectors.front().size();
  const std::size_t k = vectors.size();
  for (const auto& v : vectors) {
    if (v.size() != n) throw Error("invalid-dimension", "mixed vector dimensions");
    if (!(v.norm() > 0.0)) throw Error("invalid-input", "zero vector in system");
  }
  if (static_cast<Eigen::Index>(k) > n) return false;

  const double ratio_bound = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(k));
  Eigen::Index rank = 0;
  for (const auto& v : vectors) {
    Eigen::VectorXd residual = v;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < rank; ++p)
        residual -= basis.col(p).dot(residual) * basis.col(p);
    const double proj_norm = (v - residual).norm();
    if (!(proj_norm < v.norm() * ratio_bound)) return false;
    basis.col(rank++) = residual / residual.norm();
  }
  return true;
}

UnitVector combine_direction(const UnitVector& t1, const UnitVector& t2,
                             const UnitVector& t3) {
  Eigen::VectorXd combined = t1.coords() - t2.coords() + t3.coords();
  const double norm = combined.norm();
  if (!(norm > 1e-300))
    throw Error("degenerate-combination", "t1 - t2 + t3 vanished; resample t3");
  return UnitVector(Eigen::VectorXd(combined / norm));
}

bool cap_contains(const UnitVector& eta, const Eigen::VectorXd& x, double rho) {
  const double norm = x.norm();
  if (!(norm > 0.0)) throw Error("invalid-input", "cap test requires x != 0");
  // |x/|x| - eta| <= rho  <=>  <x/|x|, eta> >= 1 - rho^2/2
  const double cos_threshold = 1.0 - rho * rho / 2.0;
  return (x / norm).dot(eta.coords()) >= cos_threshold;
}

}  // namespace sg
