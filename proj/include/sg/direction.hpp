#ifndef SG_DIRECTION_HPP
#define SG_DIRECTION_HPP

#include <cstdint>
#include <utility>

#include "sg/distributions.hpp"
#include "sg/geometry.hpp"
#include "sg/rng.hpp"

namespace sg {

struct SelectionConfig {
  SelectionConstants constants;
  // Uniform sphere directions added to the candidate pool on top of the
  // heavy sample directions.
  int extra_random_candidates = 256;
  // Resample theta3 until it is nearly orthogonal to theta1 and theta2.
  bool theta3_filter = true;

  void validate() const;
};

// Everything the selection procedure produced. Construction re-checks the
// structural invariants (near-orthogonality of theta1/theta2, the combined
// direction formula, the t0 identity, cap_prob_1 >= cap_prob_2).
struct DirectionSelection {
  double quantile_m = 0.0;  // 1/3-quantile of the sample norms
  UnitVector theta1, theta2, theta3, theta;
  double t0 = 0.0;  // +infinity when cap_prob_2 == 0
  double cap_prob_1 = 0.0;
  double cap_prob_2 = 0.0;
  std::int64_t candidate_count = 0;
  std::uint64_t seed = 0;

  DirectionSelection(double quantile_m, UnitVector theta1, UnitVector theta2,
                     UnitVector theta3, UnitVector theta, double cap_prob_1,
                     double cap_prob_2, std::int64_t candidate_count, std::uint64_t seed,
                     const SelectionConstants& constants);
};

// Deterministic 1/3-quantile of the norms |x_i| by cumulative weight: the
// smallest norm value M with mass(|X| <= M) >= 2/3. Then mass(|X| >= M) >= 1/3.
double third_quantile(const Dataset& data);

// Weight of { |x| >= M and |x/|x| - eta| <= rho }.
double cap_probability(const Dataset& data, const UnitVector& eta, double M, double rho);

// Argmax of cap_probability over heavy sample directions plus random
// probes. Ties break to the lowest candidate index. The returned value is
// a 1/2-approximation of the supremum over the candidate set by
// construction; see select_direction for the full contract.
std::pair<UnitVector, double> select_theta1(const Dataset& data, double M,
                                            const SelectionConfig& cfg, RandomStream& rng);

// Same maximization restricted to candidates nearly orthogonal to theta1.
// Falls back to random admissible directions when no pool candidate
// qualifies; the value may then be 0.
std::pair<UnitVector, double> select_theta2(const Dataset& data, double M,
                                            const UnitVector& theta1,
                                            const SelectionConfig& cfg, RandomStream& rng);

// t0 = sqrt(-ln p). Returns +infinity for p == 0 and 0 for p >= 1.
double compute_t0(double cap_prob_2);

// The full procedure: quantile -> theta1 -> theta2 -> random theta3 ->
// combined direction, with all randomness drawn from `seed` in a fixed
// order before any parallel evaluation.
DirectionSelection select_direction(const Dataset& data, const SelectionConfig& cfg,
                                    std::uint64_t seed);

}  // namespace sg

#endif  // SG_DIRECTION_HPP
