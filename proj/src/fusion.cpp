#include "conflate/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conflate/conflation.hpp"
#include "conflate/errors.hpp"

namespace conflate {

namespace {

void check_lengths(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || a.size() != b.size())
        throw ArgumentError("fusion: need equal-length nonempty arrays");
    for (double v : b)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ArgumentError("fusion: variances must be positive and finite");
    for (double v : a)
        if (!std::isfinite(v)) throw ArgumentError("fusion: values must be finite");
}

}  // namespace

// Accumulation order is fixed by sorting (variance, mean) pairs, so any
// caller permutation and the closed-form normal engine produce the same
// doubles.
std::pair<double, double> gaussian_conflation_params(const std::vector<double>& means,
                                                     const std::vector<double>& variances) {
    check_lengths(means, variances);
    if (means.size() == 1) return {means[0], variances[0]};
    std::vector<std::pair<double, double>> vm(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) vm[i] = {variances[i], means[i]};
    std::sort(vm.begin(), vm.end());
    double w = 0.0, mw = 0.0;
    for (const auto& [v, m] : vm) {
        w += 1.0 / v;
        mw += m / v;
    }
    return {mw / w, 1.0 / w};
}

FusionEstimate blue_estimate(const std::vector<double>& observations,
                             const std::vector<double>& variances) {
    auto [value, variance] = gaussian_conflation_params(observations, variances);
    FusionEstimate est;
    est.value = value;
    est.variance = variance;
    double w = 0.0;
    for (double v : variances) w += 1.0 / v;
    est.weights.resize(variances.size());
    for (std::size_t i = 0; i < variances.size(); ++i)
        est.weights[i] = (1.0 / variances[i]) / w;
    return est;
}

WlsComparison compare_conflation_vs_wls(const DistributionSpec& a, const DistributionSpec& b) {
    auto ma = a.mean(), mb = b.mean();
    auto va = a.variance(), vb = b.variance();
    if (!ma || !mb || !va || !vb)
        throw ArgumentError(
            "compare_conflation_vs_wls: inputs must have finite mean and variance");
    auto conf = conflate({a, b});
    auto cm = conf.mean();
    if (!cm) throw ArgumentError("compare_conflation_vs_wls: conflation mean is not finite");
    WlsComparison cmp;
    cmp.conflation_mean = *cm;
    cmp.wls_value = blue_estimate({*ma, *mb}, {*va, *vb}).value;
    return cmp;
}

}  // namespace conflate
