#pragma once

#include <cstdint>
#include <vector>

#include "conflate/conflation.hpp"
#include "conflate/distribution.hpp"

namespace conflate {

// Accepted draws from the agreement experiment: sample X_i ~ P_i
// independently and keep X_1 when all inputs (nearly) agree.  Batches are a
// pure function of (seed, inputs, parameters).
struct SampleBatch {
    std::vector<double> values;
    long long accepted = 0;
    long long proposed = 0;
    double acceptance_rate = 0.0;
    double epsilon = 0.0;  // 0 in the exact-agreement discrete mode
    std::uint64_t seed = 0;
};

inline constexpr long long default_proposal_cap = 100000000;

// Exact agreement X_1 = ... = X_n for discrete inputs.  Throws SamplingError
// when the proposal cap is hit with no acceptances at all (incompatibility
// diagnosis); a cap hit with some acceptances returns the partial batch.
SampleBatch sample_agree_discrete(const std::vector<DistributionSpec>& specs,
                                  long long n_target, std::uint64_t seed,
                                  long long proposal_cap = default_proposal_cap);

// Near agreement |X_i - X_j| < epsilon for all pairs, a.c. inputs; throws
// when the cap is reached with fewer acceptances than asked.
// epsilon <= 0 picks the value whose predicted acceptance rate is ~1e-3.
SampleBatch sample_agree_ac(const std::vector<DistributionSpec>& specs, double epsilon,
                            long long n_target, std::uint64_t seed,
                            long long proposal_cap = default_proposal_cap);

struct DistanceReport {
    double statistic = 0.0;
    bool is_tv = false;  // TV on atoms for discrete targets, else KS
};

DistanceReport empirical_distance(const SampleBatch& batch, const ConflationResult& target);

}  // namespace conflate
