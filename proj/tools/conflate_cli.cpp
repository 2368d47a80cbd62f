#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conflate/cli_run.hpp"
#include "conflate/errors.hpp"
#include "conflate/json_io.hpp"

namespace {

using conflate::cli::JobConfig;

// --input files hold either one spec object or an array of spec objects.
void load_spec_file(const std::string& path, std::vector<conflate::DistributionSpec>& out) {
    std::ifstream f(path);
    if (!f) throw conflate::ArgumentError("cannot read input file: " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    if (j.is_array())
        for (const auto& item : j) out.push_back(conflate::spec_from_json(item));
    else
        out.push_back(conflate::spec_from_json(j));
}

void load_fuse_csv(const std::string& path, std::vector<std::pair<double, double>>& rows) {
    std::ifstream f(path);
    if (!f) throw conflate::ArgumentError("cannot read input file: " + path);
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double obs, var;
        if (is >> obs >> var) rows.emplace_back(obs, var);
        // non-numeric rows (headers) are skipped
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conflate: normalized-product consolidation of probability distributions"};
    app.require_subcommand(1);

    JobConfig cfg;
    std::vector<std::string> input_paths;
    std::vector<std::string> inline_specs;

    auto add_common = [&](CLI::App* sub, bool wants_specs) {
        if (wants_specs) {
            sub->add_option("--input", input_paths,
                            "JSON file with a distribution spec or an array of specs");
            sub->add_option("--spec", inline_specs, "inline JSON distribution spec");
        }
        sub->add_option("--out", cfg.out_path, "output path (default: stdout)");
        sub->add_option("--format", cfg.format, "json | csv | text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
    };

    auto* c_conflate = app.add_subcommand("conflate", "compute the conflation of the inputs");
    c_conflate->add_option("--grid", cfg.grid_points, "initial grid budget for the quadrature engine");
    add_common(c_conflate, true);

    auto* c_oracle = app.add_subcommand("oracle", "dyadic brute-force conflation with diagnostics");
    c_oracle->add_option("--jmax", cfg.j_max, "maximum dyadic level (<= 30)");
    c_oracle->add_option("--tv-tol", cfg.tv_tol, "successive total-variation stopping tolerance");
    add_common(c_oracle, true);

    auto* c_diag = app.add_subcommand("diagnose",
                                      "information-loss, likelihood-ratio and proportionality "
                                      "reports for the conflation of the inputs");
    c_diag->add_option("--tol", cfg.tol, "proportionality tolerance");
    add_common(c_diag, true);

    auto* c_sample = app.add_subcommand("sample", "rejection-sample the agreement experiment");
    c_sample->add_option("--epsilon", cfg.epsilon, "agreement window for continuous inputs (0 = auto)");
    c_sample->add_option("--n", cfg.n_target, "target number of accepted draws");
    c_sample->add_option("--seed", cfg.seed, "random seed");
    c_sample->add_option("--cap", cfg.proposal_cap, "proposal cap");
    add_common(c_sample, true);

    auto* c_fuse = app.add_subcommand("fuse",
                                      "inverse-variance weighted estimate from CSV rows "
                                      "(observation, variance)");
    add_common(c_fuse, true);

    auto* c_verify = app.add_subcommand("verify", "run the built-in worked-example suite");
    add_common(c_verify, false);

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    try {
        if (cfg.command == "fuse") {
            for (const auto& p : input_paths) load_fuse_csv(p, cfg.fuse_rows);
        } else {
            for (const auto& p : input_paths) load_spec_file(p, cfg.inputs);
        }
        for (const auto& s : inline_specs)
            cfg.inputs.push_back(conflate::spec_from_json(nlohmann::json::parse(s)));
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return 1;
    } catch (const conflate::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return conflate::cli::run(cfg, std::cout, std::cerr);
}
