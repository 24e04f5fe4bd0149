#ifndef SG_DISTRIBUTIONS_HPP
#define SG_DISTRIBUTIONS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace sg {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The empirical law of a random vector: N weighted samples in R^n.
// Weights are normalized to total mass 1 at construction; an empty weight
// vector means uniform 1/N (the common case for generated data, kept
// implicit so mass accumulations can run on exact integer counts).
// Rows with near-zero norm are rejected: the model assumes the law puts no
// mass at the origin. Norms and unit directions are cached.
class Dataset {
 public:
  explicit Dataset(RowMatrix samples, std::vector<double> weights = {});

  std::size_t size() const { return static_cast<std::size_t>(samples_.rows()); }
  Eigen::Index dim() const { return samples_.cols(); }

  const RowMatrix& samples() const { return samples_; }
  const RowMatrix& unit_rows() const { return unit_rows_; }
  const Eigen::VectorXd& norms() const { return norms_; }

  bool uniform_weights() const { return weights_.empty(); }
  double weight(std::size_t i) const {
    return weights_.empty() ? 1.0 / static_cast<double>(size()) : weights_[i];
  }
  // nullptr for uniform weights, matching the kernel convention.
  const double* weights_ptr() const { return weights_.empty() ? nullptr : weights_.data(); }
  double uniform_weight() const { return 1.0 / static_cast<double>(size()); }

  // Kish effective sample size: N for uniform weights, 1/sum(w^2) otherwise.
  double effective_sample_size() const;

 private:
  RowMatrix samples_;
  std::vector<double> weights_;
  RowMatrix unit_rows_;
  Eigen::VectorXd norms_;
};

// Synthetic source families.
struct SourceSpec {
  enum class Family {
    UniformBall,       // uniform on a centered Euclidean ball
    Gaussian,          // centered, diagonal covariance
    FiniteAtoms,       // discrete law on a finite point set
    SubspaceMixture,   // mixture of standard Gaussians on leading-coordinate subspaces
    ProductHeavyTail,  // independent standard Cauchy coordinates
  };

  struct Atom {
    Eigen::VectorXd point;
    double prob = 0.0;
  };

  Family family = Family::UniformBall;
  Eigen::Index dim = 1;
  double radius = 1.0;                  // UniformBall
  Eigen::VectorXd cov_diag;             // Gaussian; empty means identity
  std::vector<Atom> atoms;              // FiniteAtoms
  std::vector<Eigen::Index> subspace_dims;  // SubspaceMixture
  std::vector<double> mixture_weights;      // SubspaceMixture

  static SourceSpec uniform_ball(Eigen::Index n, double radius = 1.0);
  static SourceSpec gaussian(Eigen::Index n, Eigen::VectorXd cov_diag = {});
  static SourceSpec finite_atoms(std::vector<Atom> atoms);
  static SourceSpec subspace_mixture(Eigen::Index n, std::vector<Eigen::Index> dims,
                                     std::vector<double> weights);
  static SourceSpec product_heavy_tail(Eigen::Index n);

  void validate() const;  // throws naming the offending field
  std::string family_name() const;
};

// count i.i.d. draws. Sampling is chunked; chunk c draws from the RNG
// substream keyed by (seed, c), so output is identical for any worker count.
Dataset sample(const SourceSpec& spec, std::uint64_t seed, std::size_t count);

// The one-dimensional marginal of the uniform ball: density proportional to
// (1 - t^2 / (scale^2 n))_+^{(n-1)/2}, supported on [-scale*sqrt(n), scale*sqrt(n)].
struct BallMarginal {
  Eigen::Index dim = 1;
  double scale = 1.0;  // the parameter A, in units of length
};

double ball_marginal_pdf(const BallMarginal& m, double t);

// P(Y >= t) for t >= 0, via the regularized incomplete beta function.
// The law is symmetric, so P(Y <= -t) is the same number.
double ball_marginal_tail(const BallMarginal& m, double t);

// Plain numeric CSV, one sample per row, no header, '\n' endings, 17
// significant digits on save. Weights are not representable: files load
// with uniform weights.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

}  // namespace sg

#endif  // SG_DISTRIBUTIONS_HPP
