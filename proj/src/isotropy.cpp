#include "sg/isotropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sg/error.hpp"
#include "sg/kernels.hpp"
#include "sg/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sg {

namespace {

constexpr std::size_t kSolveBlock = 8192;

// q_i = x_i^T Sigma^{-1} x_i via one triangular solve per block of samples.
Eigen::VectorXd quadratic_forms(const Dataset& data, const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const std::size_t count = data.size();
  const Eigen::Index n = data.dim();
  Eigen::VectorXd q(static_cast<Eigen::Index>(count));
  const std::size_t blocks = (count + kSolveBlock - 1) / kSolveBlock;
  const int threads = parallel::thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kSolveBlock;
    const std::size_t end = std::min(count, begin + kSolveBlock);
    Eigen::MatrixXd block = data.samples()
                                .middleRows(static_cast<Eigen::Index>(begin),
                                            static_cast<Eigen::Index>(end - begin))
                                .transpose();
    llt.matrixL().solveInPlace(block);
    for (std::size_t i = begin; i < end; ++i)
      q[static_cast<Eigen::Index>(i)] =
          block.col(static_cast<Eigen::Index>(i - begin)).squaredNorm();
  }
  (void)threads;
  (void)n;
  return q;
}

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double angular_second_moment(const Dataset& data, const UnitVector& theta) {
  if (theta.dim() != data.dim())
    throw Error("invalid-dimension", "direction does not match dataset dimension");
  Eigen::VectorXd values(static_cast<Eigen::Index>(data.size()));
  kernels::project_values(data.unit_rows().data(), data.size(),
                          static_cast<std::size_t>(data.dim()), theta.coords().data(),
                          values.data());
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = values[static_cast<Eigen::Index>(i)];
    acc += data.weight(i) * v * v;
  }
  return acc;
}

AngularCovariance angular_covariance(const Dataset& data) {
  const auto n = static_cast<std::size_t>(data.dim());
  AngularCovariance out;
  out.matrix.resize(data.dim(), data.dim());
  kernels::outer_product_sum(data.unit_rows().data(), data.size(), n, data.weights_ptr(),
                             data.uniform_weight(), nullptr, out.matrix.data());
  out.trace_error = std::abs(out.matrix.trace() - 1.0);
  return out;
}

IsotropyTransform isotropize(const Dataset& data, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error("invalid-input", "tol must be positive");
  if (max_iter < 0) throw Error("invalid-input", "max_iter must be nonnegative");
  const Eigen::Index n = data.dim();
  const auto n_sz = static_cast<std::size_t>(n);
  const double nd = static_cast<double>(n);

  // Start from the trace-normalized second moment; ridge only if singular.
  Eigen::MatrixXd sigma(n, n);
  kernels::outer_product_sum(data.samples().data(), data.size(), n_sz, data.weights_ptr(),
                             data.uniform_weight(), nullptr, sigma.data());
  sigma *= nd / sigma.trace();
  {
    Eigen::LLT<Eigen::MatrixXd> probe(sigma);
    if (probe.info() != Eigen::Success) {
      sigma += 1e-12 * nd * Eigen::MatrixXd::Identity(n, n);
      sigma *= nd / sigma.trace();
    }
  }

  IsotropyTransform best;
  best.residual = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_image_cov;

  int updates = 0;
  while (true) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) break;  // drifted to a singular position

    const Eigen::VectorXd q = quadratic_forms(data, llt);
    Eigen::MatrixXd numerator(n, n);  // sum_i w_i x_i x_i^T / q_i
    kernels::outer_product_sum(data.samples().data(), data.size(), n_sz, data.weights_ptr(),
                               data.uniform_weight(), q.data(), numerator.data());

    const Eigen::MatrixXd a = inverse_sqrt(sigma);
    const Eigen::MatrixXd image_cov = a * numerator * a;  // angular covariance of {A x}
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(image_cov);
    const double residual =
        nd * (eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff());

    if (residual < best.residual) {
      best.matrix = a;
      best.residual = residual;
      best.iterations = updates;
      best_image_cov = image_cov;
    }
    if (residual <= tol) {
      best.matrix = a;
      best.residual = residual;
      best.iterations = updates;
      best.converged = true;
      return best;
    }
    if (updates >= max_iter) break;

    sigma = numerator * (nd / numerator.trace());
    ++updates;
  }

  best.converged = false;
  best.iterations = updates;
  if (best_image_cov.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(best_image_cov);
    best.diagnostic_direction = eig.eigenvectors().col(0);  // smallest eigenvalue
  } else {
    // Initial position was already singular; report from the raw angular
    // covariance instead.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(angular_covariance(data).matrix);
    best.matrix = Eigen::MatrixXd::Identity(n, n);
    best.residual = nd * (eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff());
    best.diagnostic_direction = eig.eigenvectors().col(0);
  }
  return best;
}

bool verify_subisotropic(const Dataset& data, double d, double slack) {
  if (!(d > 0.0)) throw Error("invalid-input", "d must be positive");
  const AngularCovariance cov = angular_covariance(data);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.matrix);
  const double nd = static_cast<double>(data.dim());
  return nd * eig.eigenvalues().maxCoeff() <= (nd / d) * (1.0 + slack);
}

Dataset apply_transform(const IsotropyTransform& transform, const Dataset& data) {
  if (transform.matrix.rows() != data.dim())
    throw Error("invalid-dimension", "transform does not match dataset dimension");
  RowMatrix image = data.samples() * transform.matrix;  // A symmetric
  std::vector<double> weights;
  if (!data.uniform_weights()) {
    weights.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) weights[i] = data.weight(i);
  }
  return Dataset(std::move(image), std::move(weights));
}

}  // namespace sg
