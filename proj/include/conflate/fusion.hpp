#pragma once

#include <utility>
#include <vector>

#include "conflate/distribution.hpp"

namespace conflate {

// Inverse-variance-weighted estimate: the mean of the Gaussian conflation of
// N(X_i, sigma_i^2), which is the classical weighted-least-squares / BLUE
// value.
struct FusionEstimate {
    double value = 0.0;
    double variance = 0.0;
    std::vector<double> weights;  // per input, sum to 1
};

// Mean and variance of the conflation of N(mu_i, sigma2_i).  Shares its
// accumulation path with the closed-form normal rule, so the two agree
// bitwise.
std::pair<double, double> gaussian_conflation_params(const std::vector<double>& means,
                                                     const std::vector<double>& variances);

FusionEstimate blue_estimate(const std::vector<double>& observations,
                             const std::vector<double>& variances);

struct WlsComparison {
    double conflation_mean = 0.0;
    double wls_value = 0.0;
};

// Mean of conflate(a, b) against the weighted-least-squares value computed
// from the inputs' means and variances.  Inputs without finite moments are
// rejected for the WLS side.
WlsComparison compare_conflation_vs_wls(const DistributionSpec& a, const DistributionSpec& b);

}  // namespace conflate
