#include "conflate/json_io.hpp"

#include <cmath>

namespace conflate {

namespace {

using nlohmann::json;

json params(std::initializer_list<std::pair<std::string, json>> kv) {
    json p = json::object();
    for (const auto& [k, v] : kv) p[k] = v;
    return p;
}

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ArgumentError(std::string("spec json: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

long long need_integer(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ArgumentError(std::string("spec json: missing integer field '") + key + "'");
    return j[key].get<long long>();
}

double bound_or(const json& j, const char* key, double unbounded) {
    if (!j.contains(key) || j[key].is_null()) return unbounded;
    if (!j[key].is_number()) throw ArgumentError("spec json: bounds must be numbers or null");
    return j[key].get<double>();
}

}  // namespace

nlohmann::json spec_to_json(const DistributionSpec& spec) {
    json j;
    const auto& v = spec.value();
    if (const auto* f = std::get_if<Normal>(&v)) {
        j = {{"kind", "normal"}, {"params", params({{"mu", f->mu}, {"sigma2", f->sigma2}})}};
    } else if (const auto* f = std::get_if<Exponential>(&v)) {
        j = {{"kind", "exponential"}, {"params", params({{"mean", f->mean}})}};
    } else if (const auto* f = std::get_if<Gamma>(&v)) {
        j = {{"kind", "gamma"}, {"params", params({{"alpha", f->alpha}, {"beta", f->beta}})}};
    } else if (const auto* f = std::get_if<BetaDist>(&v)) {
        j = {{"kind", "beta"}, {"params", params({{"alpha", f->alpha}, {"beta", f->beta}})}};
    } else if (const auto* f = std::get_if<Uniform>(&v)) {
        j = {{"kind", "uniform"}, {"params", params({{"a", f->a}, {"b", f->b}})}};
    } else if (const auto* f = std::get_if<Laplace>(&v)) {
        j = {{"kind", "laplace"}, {"params", params({{"scale", f->scale}})}};
    } else if (const auto* f = std::get_if<Pareto>(&v)) {
        j = {{"kind", "pareto"}, {"params", params({{"alpha", f->alpha}, {"beta", f->beta}})}};
    } else if (const auto* f = std::get_if<Cauchy>(&v)) {
        j = {{"kind", "cauchy"}, {"params", params({{"loc", f->loc}, {"scale", f->scale}})}};
    } else if (const auto* f = std::get_if<ChiSquare>(&v)) {
        j = {{"kind", "chi_square"}, {"params", params({{"k", f->k}})}};
    } else if (const auto* f = std::get_if<Bernoulli>(&v)) {
        j = {{"kind", "bernoulli"}, {"params", params({{"p", f->p}})}};
    } else if (const auto* f = std::get_if<Geometric>(&v)) {
        j = {{"kind", "geometric"}, {"params", params({{"p", f->p}})}};
    } else if (const auto* f = std::get_if<DiscreteUniform>(&v)) {
        j = {{"kind", "discrete_uniform"}, {"params", params({{"n", f->n}})}};
    } else if (const auto* f = std::get_if<Zipf>(&v)) {
        j = {{"kind", "zipf"}, {"params", params({{"alpha", f->alpha}, {"n", f->n}})}};
    } else if (const auto* f = std::get_if<Zeta>(&v)) {
        j = {{"kind", "zeta"}, {"params", params({{"alpha", f->alpha}})}};
    } else if (const auto* f = std::get_if<Poisson>(&v)) {
        j = {{"kind", "poisson"}, {"params", params({{"lambda", f->lambda}})}};
    } else if (const auto* f = std::get_if<Cmp>(&v)) {
        j = {{"kind", "cmp"}, {"params", params({{"lambda", f->lambda}, {"nu", f->nu}})}};
    } else if (const auto* f = std::get_if<Binomial>(&v)) {
        j = {{"kind", "binomial"}, {"params", params({{"n", f->n}, {"p", f->p}})}};
    } else if (const auto* f = std::get_if<PmfTable>(&v)) {
        json atoms = json::array();
        for (const auto& [x, m] : f->atoms) atoms.push_back(json::array({x, m}));
        j = {{"kind", "pmf"}, {"atoms", atoms}};
    } else if (const auto* f = std::get_if<GridDensity>(&v)) {
        j = {{"kind", "grid"}, {"points", f->points}, {"values", f->values}};
    } else if (const auto* f = std::get_if<Truncated>(&v)) {
        j = {{"kind", "truncated"}, {"inner", spec_to_json(*f->inner)}};
        j["lo"] = f->lo == -inf ? json(nullptr) : json(f->lo);
        j["hi"] = f->hi == inf ? json(nullptr) : json(f->hi);
    }
    return j;
}

DistributionSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ArgumentError("spec json: expected an object with a 'kind' string");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "pmf") {
        if (!j.contains("atoms") || !j["atoms"].is_array())
            throw ArgumentError("spec json: pmf needs an 'atoms' array");
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : j["atoms"]) {
            if (!a.is_array() || a.size() != 2)
                throw ArgumentError("spec json: pmf atoms must be [value, mass] pairs");
            atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
        }
        return DistributionSpec::pmf(std::move(atoms));
    }
    if (kind == "grid") {
        if (!j.contains("points") || !j.contains("values"))
            throw ArgumentError("spec json: grid needs 'points' and 'values'");
        return DistributionSpec::grid(j["points"].get<std::vector<double>>(),
                                      j["values"].get<std::vector<double>>());
    }
    if (kind == "truncated") {
        if (!j.contains("inner")) throw ArgumentError("spec json: truncated needs 'inner'");
        return DistributionSpec::truncated(spec_from_json(j["inner"]),
                                           bound_or(j, "lo", -inf), bound_or(j, "hi", inf));
    }
    const json p = j.contains("params") ? j["params"] : json::object();
    if (kind == "normal")
        return DistributionSpec::normal(need_number(p, "mu"), need_number(p, "sigma2"));
    if (kind == "exponential") return DistributionSpec::exponential(need_number(p, "mean"));
    if (kind == "gamma")
        return DistributionSpec::gamma(need_number(p, "alpha"), need_number(p, "beta"));
    if (kind == "beta")
        return DistributionSpec::beta(need_number(p, "alpha"), need_number(p, "beta"));
    if (kind == "uniform")
        return DistributionSpec::uniform(need_number(p, "a"), need_number(p, "b"));
    if (kind == "laplace") return DistributionSpec::laplace(need_number(p, "scale"));
    if (kind == "pareto")
        return DistributionSpec::pareto(need_number(p, "alpha"), need_number(p, "beta"));
    if (kind == "cauchy")
        return DistributionSpec::cauchy(need_number(p, "loc"), need_number(p, "scale"));
    if (kind == "chi_square") return DistributionSpec::chi_square(need_integer(p, "k"));
    if (kind == "bernoulli") return DistributionSpec::bernoulli(need_number(p, "p"));
    if (kind == "geometric") return DistributionSpec::geometric(need_number(p, "p"));
    if (kind == "discrete_uniform")
        return DistributionSpec::discrete_uniform(need_integer(p, "n"));
    if (kind == "zipf")
        return DistributionSpec::zipf(need_number(p, "alpha"), need_integer(p, "n"));
    if (kind == "zeta") return DistributionSpec::zeta(need_number(p, "alpha"));
    if (kind == "poisson") return DistributionSpec::poisson(need_number(p, "lambda"));
    if (kind == "cmp")
        return DistributionSpec::cmp(need_number(p, "lambda"), need_integer(p, "nu"));
    if (kind == "binomial")
        return DistributionSpec::binomial(need_integer(p, "n"), need_number(p, "p"));
    throw ArgumentError("spec json: unknown family '" + kind + "'");
}

std::string canonical_dump(const nlohmann::json& j) {
    return j.dump() + "\n";
}

std::string DistributionSpec::canonical_json() const {
    return spec_to_json(*this).dump();
}

}  // namespace conflate
