#include "conflate/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "conflate/errors.hpp"
#include "conflate/rng.hpp"

namespace conflate {

namespace {

// Inverse-cdf table for one discrete input.
struct DiscreteTable {
    std::vector<double> values;
    std::vector<double> cum;

    double draw(double u) const {
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t i = std::min(std::size_t(it - cum.begin()), values.size() - 1);
        return values[i];
    }
};

DiscreteTable build_table(const DistributionSpec& spec) {
    std::vector<std::pair<double, double>> atoms;
    spec.enumerate_atoms(1e-12, 4u << 20, atoms);
    if (atoms.empty()) throw SamplingError("sampler: input has no enumerable atoms");
    DiscreteTable t;
    t.values.reserve(atoms.size());
    t.cum.reserve(atoms.size());
    double c = 0.0;
    for (const auto& [x, m] : atoms) {
        c += m;
        t.values.push_back(x);
        t.cum.push_back(c);
    }
    return t;
}

void check_zero(const SampleBatch& b) {
    if (b.accepted == 0)
        throw SamplingError(
            "sampler: proposal cap reached with zero acceptances; the inputs look "
            "incompatible (no common agreement region)");
}

}  // namespace

SampleBatch sample_agree_discrete(const std::vector<DistributionSpec>& specs, long long n_target,
                                  std::uint64_t seed, long long proposal_cap) {
    if (specs.empty()) throw ArgumentError("sample_agree_discrete: no inputs");
    if (n_target <= 0) throw ArgumentError("sample_agree_discrete: n_target must be positive");
    for (const auto& s : specs)
        if (!s.is_discrete())
            throw ArgumentError("sample_agree_discrete: all inputs must be discrete");

    std::vector<DiscreteTable> tables;
    tables.reserve(specs.size());
    for (const auto& s : specs) tables.push_back(build_table(s));

    SampleBatch batch;
    batch.seed = seed;
    batch.epsilon = 0.0;
    batch.values.reserve(std::size_t(std::min<long long>(n_target, 1 << 20)));
    long long t = 0;
    for (; t < proposal_cap && batch.accepted < n_target; ++t) {
        double x0 = tables[0].draw(rng::uniform(seed, 0, std::uint64_t(t)));
        bool agree = true;
        for (std::size_t i = 1; i < tables.size(); ++i) {
            double xi = tables[i].draw(rng::uniform(seed, i, std::uint64_t(t)));
            if (xi != x0) {
                agree = false;
                break;
            }
        }
        if (agree) {
            batch.values.push_back(x0);
            ++batch.accepted;
        }
    }
    batch.proposed = t;
    batch.acceptance_rate = double(batch.accepted) / double(std::max<long long>(1, t));
    check_zero(batch);
    return batch;
}

SampleBatch sample_agree_ac(const std::vector<DistributionSpec>& specs, double epsilon,
                            long long n_target, std::uint64_t seed, long long proposal_cap) {
    if (specs.empty()) throw ArgumentError("sample_agree_ac: no inputs");
    if (n_target <= 0) throw ArgumentError("sample_agree_ac: n_target must be positive");
    for (const auto& s : specs)
        if (s.is_discrete())
            throw ArgumentError("sample_agree_ac: all inputs must be absolutely continuous");

    if (!(epsilon > 0.0)) {
        // aim for roughly 1e-3 acceptance: rate ≈ ∫Πf · (2ε)^(n-1)
        double c = conflate(specs).norm_constant;
        if (!(c > 0.0) || !std::isfinite(c))
            throw SamplingError("sample_agree_ac: cannot derive epsilon from the normalizer");
        double n1 = double(specs.size() - 1);
        epsilon = 0.5 * std::pow(1e-3 / c, 1.0 / n1);
    }

    SampleBatch batch;
    batch.seed = seed;
    batch.epsilon = epsilon;
    batch.values.reserve(std::size_t(std::min<long long>(n_target, 1 << 20)));
    std::vector<double> draws(specs.size());
    long long t = 0;
    for (; t < proposal_cap && batch.accepted < n_target; ++t) {
        bool agree = true;
        double lo = inf, hi = -inf;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            double x = specs[i].quantile(rng::uniform(seed, i, std::uint64_t(t)));
            draws[i] = x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            if (hi - lo >= epsilon) {  // max pairwise gap already too wide
                agree = false;
                break;
            }
        }
        if (agree) {
            batch.values.push_back(draws[0]);
            ++batch.accepted;
        }
    }
    batch.proposed = t;
    batch.acceptance_rate = double(batch.accepted) / double(std::max<long long>(1, t));
    check_zero(batch);
    if (batch.accepted < n_target)
        throw SamplingError("sampler: proposal cap reached with only " +
                            std::to_string(batch.accepted) + " of " +
                            std::to_string(n_target) + " requested acceptances");
    return batch;
}

DistanceReport empirical_distance(const SampleBatch& batch, const ConflationResult& target) {
    if (batch.values.empty()) throw ArgumentError("empirical_distance: empty batch");
    DistanceReport rep;
    const double n = double(batch.values.size());
    if (target.is_discrete()) {
        rep.is_tv = true;
        std::map<double, double> emp;
        for (double v : batch.values) emp[v] += 1.0 / n;
        auto spec = target.as_spec();
        std::vector<std::pair<double, double>> atoms;
        spec.enumerate_atoms(1e-12, 4u << 20, atoms);
        double tv = 0.0;
        for (const auto& [x, m] : atoms) {
            auto it = emp.find(x);
            double e = it == emp.end() ? 0.0 : it->second;
            tv += std::fabs(e - m);
            if (it != emp.end()) emp.erase(it);
        }
        for (const auto& [x, e] : emp) tv += e;
        rep.statistic = 0.5 * tv;
        return rep;
    }
    rep.is_tv = false;
    auto spec = target.as_spec();
    std::vector<double> sorted = batch.values;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = spec.cdf(sorted[i]);
        ks = std::max(ks, std::fabs(double(i + 1) / n - f));
        ks = std::max(ks, std::fabs(f - double(i) / n));
    }
    rep.statistic = ks;
    return rep;
}

}  // namespace conflate
