#include "sg/direction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "sg/error.hpp"
#include "sg/kernels.hpp"

namespace sg {

namespace {

constexpr int kTheta3Attempts = 1000;

double dot_row(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t d = 0; d < n; ++d) acc += a[d] * b[d];
  return acc;
}

struct CandidatePool {
  RowMatrix heavy_rows;            // gathered heavy unit directions
  std::vector<double> heavy_weights;  // empty when the dataset is uniform
  RowMatrix candidates;            // heavy directions first, then probes
  std::vector<double> masses;      // cap mass per candidate
};

// Gathers the heavy sample directions, appends the probes and evaluates the
// cap mass of every candidate in one batch.
CandidatePool evaluate_candidates(const Dataset& data, double M,
                                  const std::vector<UnitVector>& probes, double rho) {
  const auto n = static_cast<std::size_t>(data.dim());
  std::vector<std::size_t> heavy;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data.norms()[static_cast<Eigen::Index>(i)] >= M) heavy.push_back(i);
  if (heavy.empty())
    throw Error("selection-impossible", "no sample has norm >= M");

  CandidatePool pool;
  pool.heavy_rows.resize(static_cast<Eigen::Index>(heavy.size()), data.dim());
  if (!data.uniform_weights()) pool.heavy_weights.resize(heavy.size());
  for (std::size_t h = 0; h < heavy.size(); ++h) {
    pool.heavy_rows.row(static_cast<Eigen::Index>(h)) =
        data.unit_rows().row(static_cast<Eigen::Index>(heavy[h]));
    if (!data.uniform_weights()) pool.heavy_weights[h] = data.weight(heavy[h]);
  }

  const std::size_t cand_count = heavy.size() + probes.size();
  pool.candidates.resize(static_cast<Eigen::Index>(cand_count), data.dim());
  pool.candidates.topRows(static_cast<Eigen::Index>(heavy.size())) = pool.heavy_rows;
  for (std::size_t p = 0; p < probes.size(); ++p)
    pool.candidates.row(static_cast<Eigen::Index>(heavy.size() + p)) =
        probes[p].coords().transpose();

  pool.masses.resize(cand_count);
  kernels::cap_mass_batch(pool.heavy_rows.data(), heavy.size(), n,
                          pool.heavy_weights.empty() ? nullptr : pool.heavy_weights.data(),
                          data.uniform_weight(), pool.candidates.data(), cand_count,
                          1.0 - rho * rho / 2.0, pool.masses.data());
  return pool;
}

std::vector<UnitVector> draw_probes(const Dataset& data, int count, RandomStream& rng) {
  std::vector<UnitVector> probes;
  probes.reserve(static_cast<std::size_t>(count));
  for (int p = 0; p < count; ++p) probes.push_back(sample_sphere(rng, data.dim()));
  return probes;
}

// Lowest-index argmax over an optional admissibility filter.
template <typename Admissible>
std::ptrdiff_t argmax_mass(const CandidatePool& pool, Admissible admissible) {
  std::ptrdiff_t best = -1;
  double best_mass = -1.0;
  for (std::size_t j = 0; j < pool.masses.size(); ++j) {
    if (!admissible(j)) continue;
    if (pool.masses[j] > best_mass) {
      best_mass = pool.masses[j];
      best = static_cast<std::ptrdiff_t>(j);
    }
  }
  return best;
}

UnitVector candidate_vector(const CandidatePool& pool, std::ptrdiff_t j) {
  return UnitVector(Eigen::VectorXd(pool.candidates.row(j).transpose()));
}

std::pair<UnitVector, double> pick_theta2(const Dataset& data, double M,
                                          const UnitVector& theta1, const CandidatePool& pool,
                                          const SelectionConfig& cfg, RandomStream& rng) {
  if (data.dim() < 2)
    throw Error("dimension-too-small",
                "no unit vector is nearly orthogonal to theta1 in dimension 1");
  const double slack = cfg.constants.ortho_slack;
  const std::ptrdiff_t best = argmax_mass(pool, [&](std::size_t j) {
    const double c = dot_row(pool.candidates.data() + j * static_cast<std::size_t>(data.dim()),
                             theta1.coords().data(), static_cast<std::size_t>(data.dim()));
    return std::abs(c) <= slack;
  });
  if (best >= 0) return {candidate_vector(pool, best), pool.masses[best]};

  // No pool candidate is admissible; fall back to a random admissible
  // direction (its cap will typically carry no mass).
  for (int attempt = 0; attempt < kTheta3Attempts; ++attempt) {
    UnitVector eta = sample_sphere(rng, data.dim());
    if (std::abs(eta.dot(theta1)) <= slack)
      return {eta, cap_probability(data, eta, M, cfg.constants.cap_radius)};
  }
  throw Error("resampling-failed", "could not find an admissible theta2 direction");
}

}  // namespace

void SelectionConfig::validate() const {
  constants.validate();
  if (extra_random_candidates < 0)
    throw Error("invalid-config", "extra_random_candidates must be >= 0");
}

DirectionSelection::DirectionSelection(double quantile_m_in, UnitVector theta1_in,
                                       UnitVector theta2_in, UnitVector theta3_in,
                                       UnitVector theta_in, double cap_prob_1_in,
                                       double cap_prob_2_in, std::int64_t candidate_count_in,
                                       std::uint64_t seed_in,
                                       const SelectionConstants& constants)
    : quantile_m(quantile_m_in),
      theta1(std::move(theta1_in)),
      theta2(std::move(theta2_in)),
      theta3(std::move(theta3_in)),
      theta(std::move(theta_in)),
      t0(compute_t0(cap_prob_2_in)),
      cap_prob_1(cap_prob_1_in),
      cap_prob_2(cap_prob_2_in),
      candidate_count(candidate_count_in),
      seed(seed_in) {
  if (!(quantile_m > 0.0)) throw Error("invalid-selection", "quantile must be positive");
  if (std::abs(theta1.dot(theta2)) > constants.ortho_slack + 1e-12)
    throw Error("invalid-selection", "theta1 and theta2 are not nearly orthogonal");
  const UnitVector recombined = combine_direction(theta1, theta2, theta3);
  if ((recombined.coords() - theta.coords()).norm() > 1e-12)
    throw Error("invalid-selection", "theta does not match the combination formula");
  if (cap_prob_1 < 0.0 || cap_prob_1 > 1.0 + 1e-12 || cap_prob_2 < 0.0 ||
      cap_prob_2 > 1.0 + 1e-12)
    throw Error("invalid-selection", "cap probabilities out of range");
  if (cap_prob_2 > cap_prob_1 + 1e-15)
    throw Error("invalid-selection", "cap_prob_2 exceeds cap_prob_1");
}

double third_quantile(const Dataset& data) {
  const std::size_t count = data.size();
  if (data.uniform_weights()) {
    std::vector<double> norms(data.norms().data(), data.norms().data() + count);
    // ceil(2N/3) lowest norms stay at or below the quantile.
    const std::size_t idx = (2 * count + 2) / 3 - 1;
    std::nth_element(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(idx),
                     norms.end());
    return norms[idx];
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double na = data.norms()[static_cast<Eigen::Index>(a)];
    const double nb = data.norms()[static_cast<Eigen::Index>(b)];
    return na != nb ? na < nb : a < b;
  });
  double cum = 0.0;
  for (std::size_t r : order) {
    cum += data.weight(r);
    if (cum + 1e-12 >= 2.0 / 3.0) return data.norms()[static_cast<Eigen::Index>(r)];
  }
  return data.norms()[static_cast<Eigen::Index>(order.back())];
}

double cap_probability(const Dataset& data, const UnitVector& eta, double M, double rho) {
  if (eta.dim() != data.dim())
    throw Error("invalid-dimension", "cap center does not match dataset dimension");
  if (!(rho > 0.0) || !(rho < std::numbers::sqrt2))
    throw Error("invalid-input", "cap radius must lie in (0, sqrt(2))");
  const double cos_threshold = 1.0 - rho * rho / 2.0;
  const auto n = static_cast<std::size_t>(data.dim());
  double mass = 0.0;
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.norms()[static_cast<Eigen::Index>(i)] < M) continue;
    if (dot_row(data.unit_rows().data() + i * n, eta.coords().data(), n) >= cos_threshold) {
      if (data.uniform_weights())
        ++hits;
      else
        mass += data.weight(i);
    }
  }
  return data.uniform_weights() ? static_cast<double>(hits) * data.uniform_weight() : mass;
}

std::pair<UnitVector, double> select_theta1(const Dataset& data, double M,
                                            const SelectionConfig& cfg, RandomStream& rng) {
  cfg.validate();
  const std::vector<UnitVector> probes =
      draw_probes(data, cfg.extra_random_candidates, rng);
  const CandidatePool pool =
      evaluate_candidates(data, M, probes, cfg.constants.cap_radius);
  const std::ptrdiff_t best = argmax_mass(pool, [](std::size_t) { return true; });
  return {candidate_vector(pool, best), pool.masses[static_cast<std::size_t>(best)]};
}

std::pair<UnitVector, double> select_theta2(const Dataset& data, double M,
                                            const UnitVector& theta1,
                                            const SelectionConfig& cfg, RandomStream& rng) {
  cfg.validate();
  const std::vector<UnitVector> probes =
      draw_probes(data, cfg.extra_random_candidates, rng);
  const CandidatePool pool =
      evaluate_candidates(data, M, probes, cfg.constants.cap_radius);
  return pick_theta2(data, M, theta1, pool, cfg, rng);
}

double compute_t0(double cap_prob_2) {
  if (cap_prob_2 < 0.0) throw Error("invalid-input", "probability below 0");
  if (cap_prob_2 == 0.0) return std::numeric_limits<double>::infinity();
  if (cap_prob_2 >= 1.0) return 0.0;
  return std::sqrt(-std::log(cap_prob_2));
}

DirectionSelection select_direction(const Dataset& data, const SelectionConfig& cfg,
                                    std::uint64_t seed) {
  cfg.validate();
  if (data.dim() < 3)
    throw Error("dimension-too-small", "selection needs ambient dimension >= 3");

  RandomStream rng(seed);
  const double M = third_quantile(data);

  // One probe list shared by both maximization stages: the theta2 search
  // then runs over a subset of the theta1 candidate set, which is what
  // makes cap_prob_1 >= cap_prob_2 structural.
  const std::vector<UnitVector> probes =
      draw_probes(data, cfg.extra_random_candidates, rng);
  const CandidatePool pool =
      evaluate_candidates(data, M, probes, cfg.constants.cap_radius);

  const std::ptrdiff_t best1 = argmax_mass(pool, [](std::size_t) { return true; });
  UnitVector theta1 = candidate_vector(pool, best1);
  const double cap_prob_1 = pool.masses[static_cast<std::size_t>(best1)];

  auto [theta2, cap_prob_2] = pick_theta2(data, M, theta1, pool, cfg, rng);

  const double slack = cfg.constants.ortho_slack;
  for (int attempt = 0; attempt < kTheta3Attempts; ++attempt) {
    UnitVector theta3 = sample_sphere(rng, data.dim());
    if (cfg.theta3_filter &&
        (std::abs(theta3.dot(theta1)) > slack || std::abs(theta3.dot(theta2)) > slack))
      continue;
    try {
      UnitVector theta = combine_direction(theta1, theta2, theta3);
      return DirectionSelection(M, theta1, theta2, std::move(theta3), std::move(theta),
                                cap_prob_1, cap_prob_2,
                                static_cast<std::int64_t>(pool.masses.size()), seed,
                                cfg.constants);
    } catch (const Error& e) {
      if (e.code() != "degenerate-combination") throw;
      // zero combination: resample theta3
    }
  }
  throw Error("resampling-failed", "exhausted theta3 resampling attempts");
}

}  // namespace sg
