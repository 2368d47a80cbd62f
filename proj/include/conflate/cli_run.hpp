#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "conflate/distribution.hpp"
#include "conflate/sampler.hpp"

namespace conflate::cli {

// One CLI job.  Exit-code contract: 0 success, 1 usage/validation error,
// 2 mathematical non-existence (undefined conflation, incompatible inputs,
// failed verification).
struct JobConfig {
    std::string command;  // conflate | oracle | diagnose | sample | fuse | verify
    std::vector<DistributionSpec> inputs;
    std::vector<std::pair<double, double>> fuse_rows;  // (observation, variance)

    int grid_points = 0;  // 0 = auto
    int j_max = 12;
    double tv_tol = 1e-4;
    double epsilon = 0.0;  // 0 = auto
    long long n_target = 100000;
    std::uint64_t seed = 0;
    long long proposal_cap = default_proposal_cap;
    double tol = 1e-9;

    std::string out_path;        // empty = stdout
    std::string format = "json"; // json | csv | text
};

struct VerifyCase {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The built-in worked-example suite behind `conflate verify`.
std::vector<VerifyCase> verify_suite();

// Executes the job, writing artifacts to out_path or `out`.
int run(const JobConfig& config, std::ostream& out, std::ostream& err);

}  // namespace conflate::cli
