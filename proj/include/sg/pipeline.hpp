#ifndef SG_PIPELINE_HPP
#define SG_PIPELINE_HPP

#include <map>
#include <optional>
#include <string>

#include "sg/direction.hpp"
#include "sg/distributions.hpp"
#include "sg/effective_rank.hpp"
#include "sg/isotropy.hpp"
#include "sg/verifier.hpp"

namespace sg {

struct CertifyConfig {
  double alpha = 0.05;
  double beta = 3.0;
  std::optional<double> length;  // default 0.3 sqrt(n)
  double grid_step = 0.25;
};

struct InputSummary {
  Eigen::Index n = 0;
  std::size_t sample_count = 0;
  std::string source;
};

// One full run: optional random projection to ceil(d) dimensions, isotropic
// repositioning, hypothesis check, direction selection, certification. The
// linear functional is reported in the ORIGINAL coordinates: for every
// sample, <x, functional> equals <A proj(x), theta>.
struct PipelineReport {
  InputSummary input_summary;
  std::optional<EffectiveRankReport> rank_report;
  std::optional<Subspace> projection;  // set when d was given
  IsotropyTransform transform;
  bool hypothesis_ok = false;        // sub-isotropy with parameter n/5
  bool hypothesis_override = false;  // certificate passed despite a failed hypothesis
  std::optional<DirectionSelection> selection;
  SuperGaussianCertificate certificate;
  TailCurve curve;
  Eigen::VectorXd functional;
  std::map<std::string, double> timings_ms;
  std::uint64_t seed = 0;
};

PipelineReport run_pipeline(const Dataset& data, std::optional<double> d,
                            const SelectionConfig& sel_cfg, const CertifyConfig& cert_cfg,
                            std::uint64_t seed, const std::string& source_label = "dataset");

PipelineReport run_pipeline(const SourceSpec& spec, std::size_t count,
                            std::optional<double> d, const SelectionConfig& sel_cfg,
                            const CertifyConfig& cert_cfg, std::uint64_t seed);

}  // namespace sg

#endif  // SG_PIPELINE_HPP
