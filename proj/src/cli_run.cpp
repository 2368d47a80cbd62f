#include "conflate/cli_run.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "conflate/conflation.hpp"
#include "conflate/diagnostics.hpp"
#include "conflate/dyadic.hpp"
#include "conflate/errors.hpp"
#include "conflate/fusion.hpp"
#include "conflate/json_io.hpp"
#include "conflate/reports_json.hpp"

namespace conflate::cli {

namespace {

using nlohmann::json;

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ArgumentError("cannot open output file: " + path);
    f << text;
}

std::string result_csv(const ConflationResult& r) {
    std::ostringstream os;
    os.precision(17);
    auto spec = r.as_spec();
    if (r.is_discrete()) {
        os << "x,mass\n";
        std::vector<std::pair<double, double>> atoms;
        spec.enumerate_atoms(1e-12, 1u << 20, atoms);
        for (const auto& [x, m] : atoms) os << x << "," << m << "\n";
    } else if (const auto* g = spec.get_if<GridDensity>()) {
        os << "x,density\n";
        for (std::size_t i = 0; i < g->points.size(); ++i)
            os << g->points[i] << "," << g->values[i] << "\n";
    } else {
        os << "x,density\n";
        double lo = spec.quantile(1e-6), hi = spec.quantile(1.0 - 1e-6);
        for (int i = 0; i < 1024; ++i) {
            double x = lo + (hi - lo) * double(i) / 1023.0;
            os << x << "," << spec.eval(x) << "\n";
        }
    }
    return os.str();
}

std::string result_text(const ConflationResult& r) {
    std::ostringstream os;
    os.precision(12);
    os << "engine:        " << engine_name(r.engine) << "\n";
    os << "norm_constant: " << r.norm_constant << "\n";
    auto spec = r.as_spec();
    os << "form:          " << spec.canonical_json() << "\n";
    if (auto m = r.mean()) os << "mean:          " << *m << "\n";
    if (auto v = r.variance()) os << "variance:      " << *v << "\n";
    for (const auto& w : r.warnings) os << "warning:       " << w << "\n";
    return os.str();
}

int run_conflate(const JobConfig& cfg, std::ostream& out) {
    ConflateOptions opts;
    if (cfg.grid_points > 0) opts.grid.initial_points = cfg.grid_points;
    auto r = conflate(cfg.inputs, opts);
    if (cfg.format == "csv") {
        write_text(cfg.out_path, result_csv(r), out);
    } else if (cfg.format == "text") {
        write_text(cfg.out_path, result_text(r), out);
    } else {
        write_text(cfg.out_path, canonical_dump(result_to_json(r)), out);
    }
    return 0;
}

int run_oracle(const JobConfig& cfg, std::ostream& out) {
    auto rep = oracle_conflation(cfg.inputs, cfg.j_max, cfg.tv_tol);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "x,mass\n";
        for (const auto& [x, m] : rep.approx.atoms) os << x << "," << m << "\n";
        write_text(cfg.out_path, os.str(), out);
    } else if (cfg.format == "text") {
        std::ostringstream os;
        os.precision(12);
        os << "achieved_level: " << rep.achieved_level << "\n";
        os << "monotonicity_ok: " << (rep.monotonicity_ok ? "yes" : "no") << "\n";
        os << "escape_flag: " << (rep.escape_flag ? "yes" : "no") << "\n";
        os << "mass_sequence:";
        for (double m : rep.mass_sequence) os << " " << m;
        os << "\natoms: " << rep.approx.atoms.size() << "\n";
        write_text(cfg.out_path, os.str(), out);
    } else {
        write_text(cfg.out_path, canonical_dump(oracle_report_to_json(rep)), out);
    }
    return 0;
}

int run_diagnose(const JobConfig& cfg, std::ostream& out) {
    auto conf = conflate(cfg.inputs);
    auto q = conf.as_spec();
    json rep;
    rep["conflation"] = result_to_json(conf);
    try {
        rep["information"] = information_report_to_json(max_information_loss(q, cfg.inputs));
    } catch (const Error& e) {
        rep["information"] = {{"skipped", e.what()}};
    }
    try {
        rep["mlr"] = mlr_report_to_json(mlr_delta(q, cfg.inputs));
    } catch (const Error& e) {
        rep["mlr"] = {{"skipped", e.what()}};
    }
    try {
        rep["proportionality"] =
            proportionality_report_to_json(proportionality_check(q, cfg.inputs, cfg.tol));
    } catch (const Error& e) {
        rep["proportionality"] = {{"skipped", e.what()}};
    }
    if (cfg.inputs.size() == 2) {
        try {
            rep["convolution_residual"] = convolution_check(cfg.inputs[0], cfg.inputs[1]);
        } catch (const Error& e) {
            rep["convolution_residual"] = {{"skipped", e.what()}};
        }
    }
    if (cfg.format == "text") {
        std::ostringstream os;
        os << std::setw(18) << std::left << "check" << "result\n";
        for (const auto& [k, v] : rep.items())
            os << std::setw(18) << std::left << k << v.dump() << "\n";
        write_text(cfg.out_path, os.str(), out);
    } else {
        write_text(cfg.out_path, canonical_dump(rep), out);
    }
    return 0;
}

int run_sample(const JobConfig& cfg, std::ostream& out) {
    bool all_discrete = true, any_discrete = false;
    for (const auto& s : cfg.inputs) {
        all_discrete = all_discrete && s.is_discrete();
        any_discrete = any_discrete || s.is_discrete();
    }
    if (any_discrete && !all_discrete)
        throw ArgumentError("sample: inputs must be all discrete or all continuous");
    SampleBatch batch =
        all_discrete
            ? sample_agree_discrete(cfg.inputs, cfg.n_target, cfg.seed, cfg.proposal_cap)
            : sample_agree_ac(cfg.inputs, cfg.epsilon, cfg.n_target, cfg.seed,
                              cfg.proposal_cap);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        for (double v : batch.values) os << v << "\n";
        write_text(cfg.out_path, os.str(), out);
        out << canonical_dump(batch_meta_to_json(batch));
    } else {
        json j = batch_meta_to_json(batch);
        if (!cfg.out_path.empty()) {
            std::ostringstream os;
            os.precision(17);
            for (double v : batch.values) os << v << "\n";
            write_text(cfg.out_path + ".csv", os.str(), out);
            j["values_path"] = cfg.out_path + ".csv";
            write_text(cfg.out_path, canonical_dump(j), out);
        } else {
            j["values"] = batch.values;
            out << canonical_dump(j);
        }
    }
    return 0;
}

int run_fuse(const JobConfig& cfg, std::ostream& out) {
    if (cfg.fuse_rows.empty())
        throw ArgumentError("fuse: needs CSV rows of (observation, variance)");
    std::vector<double> obs, vars;
    for (const auto& [o, v] : cfg.fuse_rows) {
        obs.push_back(o);
        vars.push_back(v);
    }
    auto est = blue_estimate(obs, vars);
    write_text(cfg.out_path, canonical_dump(fusion_estimate_to_json(est)), out);
    return 0;
}

int run_verify(const JobConfig& cfg, std::ostream& out) {
    auto cases = verify_suite();
    std::ostringstream os;
    bool all = true;
    for (const auto& c : cases) {
        os << (c.pass ? "PASS" : "FAIL") << "  " << std::setw(26) << std::left << c.name
           << c.detail << "\n";
        all = all && c.pass;
    }
    os << (all ? "all examples pass" : "verification FAILED") << "\n";
    write_text(cfg.out_path, os.str(), out);
    return all ? 0 : 2;
}

}  // namespace

// Built-in worked cases with independently computed expectations.
std::vector<VerifyCase> verify_suite() {
    std::vector<VerifyCase> cases;
    auto add = [&](const std::string& name, bool pass, std::string detail) {
        cases.push_back({name, pass, std::move(detail)});
    };
    auto fmt = [](double x) {
        std::ostringstream os;
        os.precision(6);
        os << x;
        return os.str();
    };

    const auto b1 = DistributionSpec::bernoulli(1.0 / 3.0);
    const auto b2 = DistributionSpec::bernoulli(0.25);

    {  // dyadic measure of the two Bernoullis, constant across levels
        bool ok = true;
        double worst = 0.0;
        for (int j = 1; j <= 10; ++j) {
            auto mu = mu_j({b1, b2}, j, {-2.0, 3.0});
            double m0 = 0.0, m1 = 0.0;
            for (std::size_t i = 0; i < mu.masses.size(); ++i) {
                if (mu.point(i) == 0.0) m0 = mu.masses[i].second;
                if (mu.point(i) == 1.0) m1 = mu.masses[i].second;
            }
            worst = std::max({worst, std::fabs(m0 - 0.5), std::fabs(m1 - 1.0 / 12.0)});
            ok = ok && mu.masses.size() == 2;
        }
        add("dyadic-bernoulli", ok && worst <= 1e-15, "dyadic masses {0: 1/2, 1: 1/12}, dev " + fmt(worst));
    }
    {  // Bernoulli conflation
        auto r = conflate({b1, b2});
        auto s = r.as_spec();
        double e = std::max(std::fabs(s.atom_mass(0) - 6.0 / 7.0),
                            std::fabs(s.atom_mass(1) - 1.0 / 7.0));
        e = std::max(e, std::fabs(r.norm_constant - 7.0 / 12.0));
        add("bernoulli-pair", e <= 1e-12, "pmf {0: 6/7, 1: 1/7}, norm 7/12, dev " + fmt(e));
    }
    {  // normal times Bernoulli: atoms weighted by the density values
        auto r = conflate({DistributionSpec::normal(0, 1), b1});
        auto s = r.as_spec();
        double w = 2.0 / (2.0 + std::exp(-0.5));
        double e = std::max(std::fabs(s.atom_mass(0) - w), std::fabs(s.atom_mass(1) - (1.0 - w)));
        add("normal-x-bernoulli", e <= 1e-12, "mixed atoms {0, 1}, dev " + fmt(e));
    }
    {  // binomial(2,1/3) with Poisson(5)
        auto r = conflate({DistributionSpec::binomial(2, 1.0 / 3.0), DistributionSpec::poisson(5)});
        auto s = r.as_spec();
        double e = std::max({std::fabs(s.atom_mass(0) - 8.0 / 73.0),
                             std::fabs(s.atom_mass(1) - 40.0 / 73.0),
                             std::fabs(s.atom_mass(2) - 25.0 / 73.0)});
        add("binomial-x-poisson", e <= 1e-12, "pmf {8/73, 40/73, 25/73}, dev " + fmt(e));
    }
    {  // standard normal with exponential: shifted normal conditioned positive
        auto r = conflate({DistributionSpec::normal(0, 1), DistributionSpec::exponential(1)});
        auto target = DistributionSpec::truncated(DistributionSpec::normal(-1, 1), 0, inf);
        double sup = 0.0;
        const auto* g = std::get_if<GridDensity>(&r.form);
        if (g)
            for (std::size_t i = 0; i < g->points.size(); ++i)
                sup = std::max(sup, std::fabs(g->values[i] - target.eval(g->points[i])));
        add("normal-x-exponential", g && sup <= 1e-6, "density vs shifted truncated normal, sup " + fmt(sup));
    }
    {  // two standard normals: N(0, 1/2) and the convolution identity
        auto r = conflate({DistributionSpec::normal(0, 1), DistributionSpec::normal(0, 1)});
        auto f_spec = r.as_spec();

        const auto* f = f_spec.get_if<Normal>();
        double e = f ? std::max(std::fabs(f->mu), std::fabs(f->sigma2 - 0.5)) : inf;
        double resid = convolution_check(DistributionSpec::normal(0, 1),
                                         DistributionSpec::normal(0, 1), 10.0, 2001);
        add("normal-pair-convolution", e <= 1e-12 && resid <= 1e-6,
            "N(0,1/2), param dev " + fmt(e) + ", convolution residual " + fmt(resid));
    }
    {  // N(1,1) with N(2,4)
        auto r = conflate({DistributionSpec::normal(1, 1), DistributionSpec::normal(2, 4)});
        auto f_spec = r.as_spec();

        const auto* f = f_spec.get_if<Normal>();
        double e = f ? std::max(std::fabs(f->mu - 1.2), std::fabs(f->sigma2 - 0.8)) : inf;
        add("gaussian-closed-form", e <= 1e-12, "N(6/5, 4/5), dev " + fmt(e));
    }
    {  // uniform pair: conflation ignores the outlier tail, WLS does not
        auto r = conflate({DistributionSpec::uniform(0, 1), DistributionSpec::uniform(-0.1, 1)});
        auto f_spec = r.as_spec();

        const auto* f = f_spec.get_if<Uniform>();
        double mean = r.mean().value_or(inf);
        double wls = blue_estimate({0.5, 0.45}, {1.0 / 12.0, 1.21 / 12.0}).value;
        bool ok = f && f->a == 0.0 && f->b == 1.0 && std::fabs(mean - 0.5) <= 1e-9 && wls < 0.48;
        add("uniform-vs-wls", ok, "U(0,1), mean 1/2, wls " + fmt(wls) + " < 0.48");
    }
    return cases;
}

int run(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command != "fuse" && cfg.command != "verify" && cfg.inputs.empty())
            throw ArgumentError(cfg.command + ": at least one input distribution is required");
        if (cfg.command == "conflate") return run_conflate(cfg, out);
        if (cfg.command == "oracle") return run_oracle(cfg, out);
        if (cfg.command == "diagnose") return run_diagnose(cfg, out);
        if (cfg.command == "sample") return run_sample(cfg, out);
        if (cfg.command == "fuse") return run_fuse(cfg, out);
        if (cfg.command == "verify") return run_verify(cfg, out);
        throw ArgumentError("unknown command: " + cfg.command);
    } catch (const IncompatibilityError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SamplingError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed JSON: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace conflate::cli
