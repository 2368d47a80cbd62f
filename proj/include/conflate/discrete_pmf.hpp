#pragma once

#include <utility>
#include <vector>

namespace conflate {

// A normalized discrete probability mass function on explicit atoms, plus a
// bound on the mass any truncated enumeration left out.  Masses are strictly
// positive and sum to 1 within 1e-12 + tail_bound.
struct DiscretePMF {
    std::vector<std::pair<double, double>> atoms;  // ascending values
    double tail_bound = 0.0;

    double mass_at(double x) const;
    double total() const;
};

// Total-variation distance on the union of atom sets.
double tv_distance(const DiscretePMF& a, const DiscretePMF& b);

}  // namespace conflate
