#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "conflate/discrete_pmf.hpp"
#include "conflate/distribution.hpp"

namespace conflate {

// The level-j dyadic product measure: mass at k*2^-j is the product over
// inputs of the probability of the cell [k*2^-j, (k+1)*2^-j).  Cells are
// left-closed with the mass at the left endpoint; dyadic refinement then maps
// atom k at level j+1 onto atom floor(k/2) at level j.
struct DyadicMeasure {
    int level = 1;
    std::vector<std::pair<long long, double>> masses;  // ascending k, positive mass
    double total_mass = 0.0;
    long long window_lo = 0, window_hi = 0;  // cells cover [window_lo, window_hi) in x units
    double tail_bound = 0.0;                 // product mass possibly outside the window

    double point(std::size_t i) const { return std::ldexp(double(masses[i].first), -level); }
};

inline constexpr int dyadic_level_cap = 30;

// Integer window [lo, hi] from the union of per-spec quantile ranges; widens
// the tail level (starting at 1e-9) until the level-j cell count fits the
// budget.
std::pair<double, double> default_window(const std::vector<DistributionSpec>& specs,
                                         int level_for_budget,
                                         long long cell_budget = 1ll << 22);

DyadicMeasure mu_j(const std::vector<DistributionSpec>& specs, int level,
                   std::pair<double, double> window);

// mu / ||mu||.  Throws IncompatibilityError when the total mass is zero.
DiscretePMF normalized(const DyadicMeasure& mu);

struct OracleReport {
    DiscretePMF approx;                 // normalized mu at the final level
    std::vector<double> mass_sequence;  // ||mu_j|| for j = 1..achieved_level
    bool monotonicity_ok = true;
    bool escape_flag = false;
    int achieved_level = 0;
    double tail_bound = 0.0;
    std::pair<double, double> window{0.0, 0.0};
};

// Brute-force conflation: iterates mu_j until successive normalized measures
// agree within tv_tol on the coarser grid, watching the refinement
// inequality and for mass escaping every fixed window.
OracleReport oracle_conflation(const std::vector<DistributionSpec>& specs, int j_max,
                               double tv_tol);

}  // namespace conflate
