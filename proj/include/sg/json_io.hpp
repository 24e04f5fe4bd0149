#ifndef SG_JSON_IO_HPP
#define SG_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "sg/direction.hpp"
#include "sg/effective_rank.hpp"
#include "sg/isotropy.hpp"
#include "sg/pipeline.hpp"
#include "sg/verifier.hpp"

namespace sg {

// Reports serialize with insertion-ordered keys so identical inputs give
// byte-identical documents.
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

Json to_json(const EffectiveRankReport& report);
Json to_json(const IsotropyTransform& transform);
Json to_json(const DirectionSelection& selection);
Json to_json(const SuperGaussianCertificate& cert, const TailCurve& curve);
Json to_json(const PipelineReport& report);

// Round-trip loaders for the pieces the CLI consumes.
UnitVector theta_from_json(const Json& j);
PipelineReport pipeline_report_from_json(const Json& j);

}  // namespace sg

#endif  // SG_JSON_IO_HPP
