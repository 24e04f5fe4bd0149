#include "sg/distributions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "sg/error.hpp"
#include "sg/parallel.hpp"
#include "sg/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sg {

namespace {

constexpr double kZeroNorm = 1e-300;
constexpr std::size_t kSampleChunk = 1024;

double pairwise_sum(const double* v, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += v[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, count - half);
}

}  // namespace

Dataset::Dataset(RowMatrix samples, std::vector<double> weights)
    : samples_(std::move(samples)), weights_(std::move(weights)) {
  const std::size_t n_rows = static_cast<std::size_t>(samples_.rows());
  if (n_rows == 0) throw Error("invalid-input", "dataset needs at least one sample");
  if (samples_.cols() == 0) throw Error("invalid-dimension", "zero ambient dimension");
  if (!weights_.empty()) {
    if (weights_.size() != n_rows)
      throw Error("invalid-input", "weight count does not match sample count");
    for (double w : weights_)
      if (!(w >= 0.0)) throw Error("invalid-input", "negative weight");
    const double total = pairwise_sum(weights_.data(), weights_.size());
    if (!(total > 0.0)) throw Error("invalid-input", "weights sum to zero");
    for (double& w : weights_) w /= total;
    const double renormed = pairwise_sum(weights_.data(), weights_.size());
    if (std::abs(renormed - 1.0) > 1e-12)
      throw Error("invalid-input", "weights failed to normalize");
  }
  norms_.resize(samples_.rows());
  unit_rows_.resize(samples_.rows(), samples_.cols());
  for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
    const double norm = samples_.row(i).norm();
    if (norm < kZeroNorm)
      throw Error("zero-sample", "sample " + std::to_string(i) + " is at the origin");
    norms_[i] = norm;
    unit_rows_.row(i) = samples_.row(i) / norm;
  }
}

double Dataset::effective_sample_size() const {
  if (weights_.empty()) return static_cast<double>(size());
  double sum_sq = 0.0;
  for (double w : weights_) sum_sq += w * w;
  return 1.0 / sum_sq;
}

SourceSpec SourceSpec::uniform_ball(Eigen::Index n, double radius) {
  SourceSpec s;
  s.family = Family::UniformBall;
  s.dim = n;
  s.radius = radius;
  return s;
}

SourceSpec SourceSpec::gaussian(Eigen::Index n, Eigen::VectorXd cov_diag) {
  SourceSpec s;
  s.family = Family::Gaussian;
  s.dim = n;
  s.cov_diag = std::move(cov_diag);
  return s;
}

SourceSpec SourceSpec::finite_atoms(std::vector<Atom> atoms) {
  SourceSpec s;
  s.family = Family::FiniteAtoms;
  s.dim = atoms.empty() ? 0 : atoms.front().point.size();
  s.atoms = std::move(atoms);
  return s;
}

SourceSpec SourceSpec::subspace_mixture(Eigen::Index n, std::vector<Eigen::Index> dims,
                                        std::vector<double> weights) {
  SourceSpec s;
  s.family = Family::SubspaceMixture;
  s.dim = n;
  s.subspace_dims = std::move(dims);
  s.mixture_weights = std::move(weights);
  return s;
}

SourceSpec SourceSpec::product_heavy_tail(Eigen::Index n) {
  SourceSpec s;
  s.family = Family::ProductHeavyTail;
  s.dim = n;
  return s;
}

void SourceSpec::validate() const {
  if (dim < 1) throw Error("invalid-spec", "dim must be >= 1");
  switch (family) {
    case Family::UniformBall:
      if (!(radius > 0.0)) throw Error("invalid-spec", "radius must be positive");
      break;
    case Family::Gaussian:
      if (cov_diag.size() != 0) {
        if (cov_diag.size() != dim)
          throw Error("invalid-spec", "cov_diag length does not match dim");
        for (Eigen::Index i = 0; i < cov_diag.size(); ++i)
          if (!(cov_diag[i] > 0.0))
            throw Error("invalid-spec", "cov_diag entries must be positive");
      }
      break;
    case Family::FiniteAtoms: {
      if (atoms.empty()) throw Error("invalid-spec", "atoms must be nonempty");
      double total = 0.0;
      for (const auto& atom : atoms) {
        if (atom.point.size() != dim)
          throw Error("invalid-spec", "atom dimension does not match dim");
        if (!(atom.prob > 0.0)) throw Error("invalid-spec", "atom prob must be positive");
        if (atom.point.norm() < kZeroNorm)
          throw Error("invalid-spec", "atoms must not contain the origin");
        total += atom.prob;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw Error("invalid-spec", "atom probs must sum to 1");
      break;
    }
    case Family::SubspaceMixture: {
      if (subspace_dims.empty() || subspace_dims.size() != mixture_weights.size())
        throw Error("invalid-spec", "subspace_dims and mixture_weights must match");
      double total = 0.0;
      for (std::size_t j = 0; j < subspace_dims.size(); ++j) {
        if (subspace_dims[j] < 1 || subspace_dims[j] > dim)
          throw Error("invalid-spec", "subspace_dims entries must lie in [1, dim]");
        if (!(mixture_weights[j] > 0.0))
          throw Error("invalid-spec", "mixture_weights entries must be positive");
        total += mixture_weights[j];
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw Error("invalid-spec", "mixture_weights must sum to 1");
      break;
    }
    case Family::ProductHeavyTail:
      break;
  }
}

std::string SourceSpec::family_name() const {
  switch (family) {
    case Family::UniformBall: return "uniform_ball";
    case Family::Gaussian: return "gaussian";
    case Family::FiniteAtoms: return "finite_atoms";
    case Family::SubspaceMixture: return "subspace_mixture";
    case Family::ProductHeavyTail: return "product_heavy_tail";
  }
  return "unknown";
}

namespace {

// One draw into `row`. Retries internally until the norm is nonzero, so
// every dataset satisfies the no-mass-at-origin assumption.
void fill_row(const SourceSpec& spec, RandomStream& rng, double* row) {
  const Eigen::Index n = spec.dim;
  while (true) {
    switch (spec.family) {
      case SourceSpec::Family::UniformBall: {
        double norm_sq = 0.0;
        for (Eigen::Index d = 0; d < n; ++d) {
          row[d] = rng.normal();
          norm_sq += row[d] * row[d];
        }
        const double norm = std::sqrt(norm_sq);
        if (norm < kZeroNorm) continue;
        const double r =
            spec.radius * std::pow(rng.uniform01_open(), 1.0 / static_cast<double>(n));
        for (Eigen::Index d = 0; d < n; ++d) row[d] *= r / norm;
        break;
      }
      case SourceSpec::Family::Gaussian:
        for (Eigen::Index d = 0; d < n; ++d) {
          const double sd = spec.cov_diag.size() ? std::sqrt(spec.cov_diag[d]) : 1.0;
          row[d] = sd * rng.normal();
        }
        break;
      case SourceSpec::Family::FiniteAtoms: {
        const double u = rng.uniform01();
        double cum = 0.0;
        const SourceSpec::Atom* chosen = &spec.atoms.back();
        for (const auto& atom : spec.atoms) {
          cum += atom.prob;
          if (u < cum) {
            chosen = &atom;
            break;
          }
        }
        for (Eigen::Index d = 0; d < n; ++d) row[d] = chosen->point[d];
        break;
      }
      case SourceSpec::Family::SubspaceMixture: {
        const double u = rng.uniform01();
        double cum = 0.0;
        std::size_t pick = spec.subspace_dims.size() - 1;
        for (std::size_t j = 0; j < spec.mixture_weights.size(); ++j) {
          cum += spec.mixture_weights[j];
          if (u < cum) {
            pick = j;
            break;
          }
        }
        const Eigen::Index k = spec.subspace_dims[pick];
        for (Eigen::Index d = 0; d < k; ++d) row[d] = rng.normal();
        for (Eigen::Index d = k; d < n; ++d) row[d] = 0.0;
        break;
      }
      case SourceSpec::Family::ProductHeavyTail:
        for (Eigen::Index d = 0; d < n; ++d)
          row[d] = std::tan(std::numbers::pi * (rng.uniform01() - 0.5));
        break;
    }
    double norm_sq = 0.0;
    for (Eigen::Index d = 0; d < n; ++d) norm_sq += row[d] * row[d];
    if (std::sqrt(norm_sq) >= kZeroNorm) return;
  }
}

}  // namespace

Dataset sample(const SourceSpec& spec, std::uint64_t seed, std::size_t count) {
  spec.validate();
  if (count < 1) throw Error("invalid-input", "count must be >= 1");
  RowMatrix samples(static_cast<Eigen::Index>(count), spec.dim);
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  const int threads = parallel::thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(c));
    const std::size_t begin = static_cast<std::size_t>(c) * kSampleChunk;
    const std::size_t end = std::min(count, begin + kSampleChunk);
    for (std::size_t i = begin; i < end; ++i)
      fill_row(spec, rng, samples.data() + i * static_cast<std::size_t>(spec.dim));
  }
  (void)threads;
  return Dataset(std::move(samples));
}

double ball_marginal_pdf(const BallMarginal& m, double t) {
  const double n = static_cast<double>(m.dim);
  if (m.dim < 1 || !(m.scale > 0.0)) throw Error("invalid-spec", "bad ball marginal");
  const double support_sq = m.scale * m.scale * n;
  const double u = 1.0 - t * t / support_sq;
  if (u < 0.0) return 0.0;
  // Normalizer: scale * sqrt(n) * Beta(1/2, (n+1)/2), evaluated in log space.
  const double log_beta =
      std::lgamma(0.5) + std::lgamma((n + 1.0) / 2.0) - std::lgamma(n / 2.0 + 1.0);
  const double log_z = std::log(m.scale * std::sqrt(n)) + log_beta;
  return std::pow(u, (n - 1.0) / 2.0) * std::exp(-log_z);
}

double ball_marginal_tail(const BallMarginal& m, double t) {
  const double n = static_cast<double>(m.dim);
  if (m.dim < 1 || !(m.scale > 0.0)) throw Error("invalid-spec", "bad ball marginal");
  if (t < 0.0) return 1.0 - ball_marginal_tail(m, -t);
  const double s = t / (m.scale * std::sqrt(n));
  if (s >= 1.0) return 0.0;
  if (s == 0.0) return 0.5;
  const double x = (1.0 - s) * (1.0 + s);
  return 0.5 * boost::math::ibeta((n + 1.0) / 2.0, 0.5, x);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double value = 0.0;
      const auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc())
        throw Error("parse-error",
                    "line " + std::to_string(line_no) + ": not a number near '" +
                        std::string(p, std::min<std::size_t>(8, end - p)) + "'");
      row.push_back(value);
      p = next;
      if (p == end) break;
      if (*p != ',')
        throw Error("parse-error",
                    "line " + std::to_string(line_no) + ": expected ',' separator");
      ++p;
      if (p == end)
        throw Error("parse-error",
                    "line " + std::to_string(line_no) + ": trailing separator");
    }
    if (width < 0) width = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != width)
      throw Error("parse-error", "line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(width) + " fields, found " +
                                     std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("parse-error", "no data rows in " + path);
  RowMatrix samples(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < width; ++j) samples(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return Dataset(std::move(samples));
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot open " + path + " for writing");
  char buf[48];
  for (Eigen::Index i = 0; i < data.samples().rows(); ++i) {
    for (Eigen::Index j = 0; j < data.samples().cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.samples()(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("io-error", "write failed for " + path);
}

}  // namespace sg
