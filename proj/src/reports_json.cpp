#include "conflate/reports_json.hpp"

#include <cmath>

#include "conflate/json_io.hpp"

namespace conflate {

namespace {

using nlohmann::json;

json finite_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

}  // namespace

nlohmann::json pmf_to_json(const DiscretePMF& pmf) {
    json atoms = json::array();
    for (const auto& [x, m] : pmf.atoms) atoms.push_back(json::array({x, m}));
    return {{"kind", "pmf"}, {"atoms", atoms}};
}

nlohmann::json result_to_json(const ConflationResult& r) {
    json form;
    if (const auto* pmf = std::get_if<DiscretePMF>(&r.form)) {
        form = pmf_to_json(*pmf);
    } else if (const auto* g = std::get_if<GridDensity>(&r.form)) {
        form = {{"kind", "grid"}, {"points", g->points}, {"values", g->values}};
    } else {
        form = spec_to_json(std::get<DistributionSpec>(r.form));
    }
    return {{"engine", engine_name(r.engine)},
            {"form", form},
            {"norm_constant", finite_or_null(r.norm_constant)},
            {"warnings", r.warnings}};
}

nlohmann::json oracle_report_to_json(const OracleReport& r) {
    return {{"approx", pmf_to_json(r.approx)},
            {"mass_sequence", r.mass_sequence},
            {"monotonicity_ok", r.monotonicity_ok},
            {"escape_flag", r.escape_flag},
            {"achieved_level", r.achieved_level},
            {"tail_bound", r.tail_bound},
            {"window", json::array({r.window.first, r.window.second})}};
}

nlohmann::json event_to_json(const EventSet& e) {
    if (e.kind == EventSet::Kind::atom_union) return {{"kind", "atoms"}, {"values", e.atoms}};
    json iv = json::array();
    for (const auto& [a, b] : e.intervals) iv.push_back(json::array({a, b}));
    return {{"kind", "intervals"}, {"intervals", iv}};
}

nlohmann::json information_report_to_json(const InformationReport& r) {
    return {{"bound", r.bound},
            {"max_loss", finite_or_null(r.max_loss)},
            {"witness", event_to_json(r.witness)},
            {"attains_bound", r.attains_bound},
            {"search_level", r.search_level}};
}

nlohmann::json mlr_report_to_json(const MlrReport& r) {
    return {{"delta", finite_or_null(r.delta)},
            {"argmax_point", finite_or_null(r.argmax_point)},
            {"argmin_point", finite_or_null(r.argmin_point)}};
}

nlohmann::json proportionality_report_to_json(const ProportionalityReport& r) {
    return {{"ok", r.ok},
            {"worst_x", finite_or_null(r.worst_x)},
            {"worst_y", finite_or_null(r.worst_y)},
            {"worst_deviation", finite_or_null(r.worst_deviation)}};
}

nlohmann::json fusion_estimate_to_json(const FusionEstimate& e) {
    return {{"value", e.value}, {"variance", e.variance}, {"weights", e.weights}};
}

nlohmann::json batch_meta_to_json(const SampleBatch& b) {
    return {{"accepted", b.accepted},
            {"proposed", b.proposed},
            {"acceptance_rate", b.acceptance_rate},
            {"epsilon", b.epsilon},
            {"seed", b.seed}};
}

}  // namespace conflate
