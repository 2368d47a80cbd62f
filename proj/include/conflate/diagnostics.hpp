#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "conflate/conflation.hpp"
#include "conflate/distribution.hpp"

namespace conflate {

// A measurable event: a finite set of atoms or a finite union of disjoint
// half-open intervals (a, b].
struct EventSet {
    enum class Kind { atom_union, interval_union };
    Kind kind = Kind::atom_union;
    std::vector<double> atoms;
    std::vector<std::pair<double, double>> intervals;

    static EventSet of_atoms(std::vector<double> xs);
    static EventSet of_intervals(std::vector<std::pair<double, double>> iv);
};

double event_prob(const DistributionSpec& spec, const EventSet& ev);

// Joint surprisal -log2 Π P_i(A); +inf when the product vanishes.
double joint_information(const std::vector<DistributionSpec>& specs, const EventSet& ev);

// Surprisal loss of the candidate against the joint: log2(Q(A)/Π P_i(A))
// when Π P_i(A) > 0; 0 when both vanish; +inf when only the product does.
double information_loss(const DistributionSpec& q, const std::vector<DistributionSpec>& specs,
                        const EventSet& ev);

struct InformationReport {
    double bound = 0.0;      // log2(1/||mu||) at the search granularity
    double max_loss = 0.0;   // may be +inf
    EventSet witness;
    bool attains_bound = false;
    int search_level = 0;    // 0 = exact atom search, else the dyadic level used
};

// Maximizes the information loss over events.  Discrete inputs: exhaustive
// search over subsets of the common atoms (at most 20).  A.c. inputs: the
// inputs and candidate are discretized to dyadic cells at search_level; the
// maximum over cell unions is attained at a single cell because a ratio of
// sums never exceeds the largest ratio.
InformationReport max_information_loss(const DistributionSpec& q,
                                       const std::vector<DistributionSpec>& specs,
                                       int ac_level = 8);

struct MlrReport {
    double delta = 0.0;      // may be +inf
    double argmax_point = 0.0;
    double argmin_point = 0.0;
};

// Likelihood-ratio spread max q/Πp - min q/Πp with the 0/0 := 1 convention;
// continuous inputs use grid essential sup/inf.
MlrReport mlr_delta(const DistributionSpec& q, const std::vector<DistributionSpec>& specs);

struct ProportionalityReport {
    bool ok = false;
    double worst_x = 0.0, worst_y = 0.0;
    double worst_deviation = 0.0;  // |log q(x)/q(y) - log Πp(x)/Πp(y)|
};

// Checks q(x)/q(y) = Πp_i(x)/Πp_i(y) against an anchor point of maximal
// product mass (transitivity makes the anchor form equivalent to all pairs).
ProportionalityReport proportionality_check(const DistributionSpec& q,
                                            const std::vector<DistributionSpec>& specs,
                                            double tol);

struct CharacteristicGrid {
    std::vector<double> t;                       // symmetric uniform grid
    std::vector<std::complex<double>> values;
};

std::complex<double> char_fn_at(const DistributionSpec& spec, double t);
CharacteristicGrid characteristic_fn(const DistributionSpec& spec, double t_max, int n_points);

// Convolution identity for conflations: convolves the characteristic
// functions numerically on a lattice containing the t grid, divides by
// (2π)^{n-1} ∫ Π f_i, and returns the max absolute deviation from the
// characteristic function of conflate(a, b).
double convolution_check(const DistributionSpec& a, const DistributionSpec& b,
                         double t_max = 20.0, int n_points = 8193);

}  // namespace conflate
