#pragma once

#include <json.hpp>

#include "conflate/conflation.hpp"
#include "conflate/diagnostics.hpp"
#include "conflate/dyadic.hpp"
#include "conflate/fusion.hpp"
#include "conflate/sampler.hpp"

// JSON renderings of every report type.  Non-finite numbers (infinite loss,
// non-integrable normalizers) serialize as null.

namespace conflate {

nlohmann::json pmf_to_json(const DiscretePMF& pmf);
nlohmann::json result_to_json(const ConflationResult& r);
nlohmann::json oracle_report_to_json(const OracleReport& r);
nlohmann::json event_to_json(const EventSet& e);
nlohmann::json information_report_to_json(const InformationReport& r);
nlohmann::json mlr_report_to_json(const MlrReport& r);
nlohmann::json proportionality_report_to_json(const ProportionalityReport& r);
nlohmann::json fusion_estimate_to_json(const FusionEstimate& e);
nlohmann::json batch_meta_to_json(const SampleBatch& b);

}  // namespace conflate
