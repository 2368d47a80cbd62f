#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "conflate/cli_run.hpp"
#include "conflate/conflation.hpp"
#include "conflate/diagnostics.hpp"
#include "conflate/dyadic.hpp"
#include "conflate/errors.hpp"
#include "conflate/fusion.hpp"
#include "conflate/json_io.hpp"
#include "conflate/reports_json.hpp"
#include "conflate/sampler.hpp"

namespace py = pybind11;

namespace {

using nlohmann::json;

std::vector<conflate::DistributionSpec> parse_specs(const std::string& specs_json) {
    json j = json::parse(specs_json);
    if (!j.is_array()) throw conflate::ArgumentError("expected a JSON array of specs");
    std::vector<conflate::DistributionSpec> specs;
    for (const auto& item : j) specs.push_back(conflate::spec_from_json(item));
    return specs;
}

conflate::DistributionSpec parse_spec(const std::string& spec_json) {
    return conflate::spec_from_json(json::parse(spec_json));
}

}  // namespace

PYBIND11_MODULE(_conflate, m) {
    m.doc() = "normalized-product consolidation of probability distributions";

    py::register_exception<conflate::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<conflate::ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<conflate::IncompatibilityError>(m, "IncompatibilityError",
                                                           PyExc_ArithmeticError);
    py::register_exception<conflate::SamplingError>(m, "SamplingError", PyExc_RuntimeError);

    m.def("validate_spec", [](const std::string& spec) {
        return parse_spec(spec).canonical_json();
    }, py::arg("spec_json"), "validate a distribution spec; returns its canonical encoding");

    m.def("eval", [](const std::string& spec, double x) { return parse_spec(spec).eval(x); },
          py::arg("spec_json"), py::arg("x"));
    m.def("cdf", [](const std::string& spec, double x) { return parse_spec(spec).cdf(x); },
          py::arg("spec_json"), py::arg("x"));
    m.def("quantile",
          [](const std::string& spec, double u) { return parse_spec(spec).quantile(u); },
          py::arg("spec_json"), py::arg("u"));
    m.def("interval_prob",
          [](const std::string& spec, double a, double b) {
              return parse_spec(spec).interval_prob(a, b);
          },
          py::arg("spec_json"), py::arg("a"), py::arg("b"));

    m.def("compatible", [](const std::string& specs) {
        return conflate::compatible(parse_specs(specs));
    }, py::arg("specs_json"));

    m.def("conflate",
          [](const std::string& specs, int grid_points) {
              conflate::ConflateOptions opts;
              if (grid_points > 0) opts.grid.initial_points = grid_points;
              return conflate::canonical_dump(
                  conflate::result_to_json(conflate::conflate(parse_specs(specs), opts)));
          },
          py::arg("specs_json"), py::arg("grid_points") = 0);

    m.def("mu_j",
          [](const std::string& specs, int level, double lo, double hi) {
              auto mu = conflate::mu_j(parse_specs(specs), level, {lo, hi});
              json masses = json::array();
              for (std::size_t i = 0; i < mu.masses.size(); ++i)
                  masses.push_back(json::array({mu.point(i), mu.masses[i].second}));
              json j = {{"level", mu.level},
                        {"masses", masses},
                        {"total_mass", mu.total_mass},
                        {"tail_bound", mu.tail_bound}};
              return conflate::canonical_dump(j);
          },
          py::arg("specs_json"), py::arg("level"), py::arg("lo"), py::arg("hi"));

    m.def("oracle_conflation",
          [](const std::string& specs, int j_max, double tv_tol) {
              return conflate::canonical_dump(conflate::oracle_report_to_json(
                  conflate::oracle_conflation(parse_specs(specs), j_max, tv_tol)));
          },
          py::arg("specs_json"), py::arg("j_max") = 12, py::arg("tv_tol") = 1e-4);

    m.def("max_information_loss",
          [](const std::string& q, const std::string& specs, int level) {
              return conflate::canonical_dump(conflate::information_report_to_json(
                  conflate::max_information_loss(parse_spec(q), parse_specs(specs), level)));
          },
          py::arg("q_json"), py::arg("specs_json"), py::arg("ac_level") = 8);

    m.def("mlr_delta", [](const std::string& q, const std::string& specs) {
        return conflate::canonical_dump(
            conflate::mlr_report_to_json(conflate::mlr_delta(parse_spec(q), parse_specs(specs))));
    }, py::arg("q_json"), py::arg("specs_json"));

    m.def("proportionality_check",
          [](const std::string& q, const std::string& specs, double tol) {
              return conflate::canonical_dump(
                  conflate::proportionality_report_to_json(conflate::proportionality_check(
                      parse_spec(q), parse_specs(specs), tol)));
          },
          py::arg("q_json"), py::arg("specs_json"), py::arg("tol") = 1e-9);

    m.def("convolution_check",
          [](const std::string& a, const std::string& b, double t_max, int n_points) {
              return conflate::convolution_check(parse_spec(a), parse_spec(b), t_max, n_points);
          },
          py::arg("a_json"), py::arg("b_json"), py::arg("t_max") = 20.0,
          py::arg("n_points") = 8193);

    m.def("gaussian_conflation_params", &conflate::gaussian_conflation_params,
          py::arg("means"), py::arg("variances"));

    m.def("blue_estimate",
          [](const std::vector<double>& obs, const std::vector<double>& vars) {
              return conflate::canonical_dump(
                  conflate::fusion_estimate_to_json(conflate::blue_estimate(obs, vars)));
          },
          py::arg("observations"), py::arg("variances"));

    m.def("sample_agree",
          [](const std::string& specs_json, double epsilon, long long n_target,
             std::uint64_t seed, long long cap) {
              auto specs = parse_specs(specs_json);
              bool all_discrete = true;
              for (const auto& s : specs) all_discrete = all_discrete && s.is_discrete();
              auto batch = all_discrete
                               ? conflate::sample_agree_discrete(specs, n_target, seed, cap)
                               : conflate::sample_agree_ac(specs, epsilon, n_target, seed, cap);
              json j = conflate::batch_meta_to_json(batch);
              j["values"] = batch.values;
              return conflate::canonical_dump(j);
          },
          py::arg("specs_json"), py::arg("epsilon") = 0.0, py::arg("n_target") = 100000,
          py::arg("seed") = 0, py::arg("proposal_cap") = conflate::default_proposal_cap);

    m.def("verify", [] {
        json cases = json::array();
        bool all = true;
        for (const auto& c : conflate::cli::verify_suite()) {
            cases.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            all = all && c.pass;
        }
        return conflate::canonical_dump(json{{"cases", cases}, {"all_pass", all}});
    });
}
