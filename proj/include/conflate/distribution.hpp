#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "conflate/errors.hpp"

namespace conflate {

class DistributionSpec;

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr long long lattice_unbounded = std::numeric_limits<long long>::max();

// Tight support of a distribution: an explicit atom list, an integer lattice
// [lo, hi] (hi = lattice_unbounded when infinite), or an open interval.
struct SupportDescriptor {
    enum class Kind { finite_atoms, integer_lattice, interval };
    Kind kind = Kind::interval;
    std::vector<double> atoms;               // finite_atoms, ascending
    long long lattice_lo = 0;                // integer_lattice
    long long lattice_hi = lattice_unbounded;
    double lo = -inf, hi = inf;              // interval, open

    bool is_discrete() const { return kind != Kind::interval; }
    // Hull of the support as a closed-ish [lo, hi] pair.
    std::pair<double, double> hull() const;
    bool contains_atom(double x) const;      // discrete kinds only
};

// --- family parameter structs ------------------------------------------------

struct Normal { double mu = 0.0, sigma2 = 1.0; };
struct Exponential { double mean = 1.0; };
struct Gamma { double alpha = 1.0, beta = 1.0; };      // shape, scale
struct BetaDist { double alpha = 1.0, beta = 1.0; };
struct Uniform { double a = 0.0, b = 1.0; };
struct Laplace { double scale = 1.0; };                // density e^{-|x|/scale}/(2 scale)
struct Pareto { double alpha = 1.0, beta = 1.0; };     // density ∝ x^-(alpha+1) on (beta, inf)
struct Cauchy { double loc = 0.0, scale = 1.0; };
struct ChiSquare { long long k = 1; };
struct Bernoulli { double p = 0.5; };
struct Geometric { double p = 0.5; };                  // support {1,2,...}
struct DiscreteUniform { long long n = 1; };           // support {1,...,n}
struct Zipf {
    double alpha = 1.0;
    long long n = 1;
    double norm = 0.0;      // Σ_{k<=n} k^-alpha, filled by validation
};
struct Zeta {
    double alpha = 2.0;
    double norm = 0.0;      // ζ(alpha), filled by validation
};
struct Poisson { double lambda = 1.0; };
struct Cmp {                                           // pmf ∝ λ^k/(k!)^ν on {0,1,...}
    double lambda = 1.0;
    long long nu = 1;
    double log_norm = 0.0;  // filled by validation
};
struct Binomial { long long n = 1; double p = 0.5; };
struct PmfTable {
    // ascending atom values with strictly positive masses; validation
    // renormalizes a total within 1e-9 of 1 and rejects anything worse.
    std::vector<std::pair<double, double>> atoms;
};
struct GridDensity {
    // piecewise-linear density on strictly increasing points; validation
    // rescales values so the trapezoid integral is exactly 1 and records the
    // pre-normalization mass in norm.
    std::vector<double> points;
    std::vector<double> values;
    double norm = 0.0;
    std::vector<double> cum;  // cumulative trapezoid mass up to points[i]
};
struct Truncated {
    std::shared_ptr<const DistributionSpec> inner;
    double lo = -inf, hi = inf;      // open window
    double window_prob = 0.0;        // inner probability of the window
};

// A validated input distribution.  Instances only exist in validated form:
// the factories and `validate` check family constraints and fill derived
// fields, so every operation below may assume a well-formed spec.  Values are
// immutable and safe to share across threads.
class DistributionSpec {
public:
    using Variant = std::variant<Normal, Exponential, Gamma, BetaDist, Uniform, Laplace,
                                 Pareto, Cauchy, ChiSquare, Bernoulli, Geometric,
                                 DiscreteUniform, Zipf, Zeta, Poisson, Cmp, Binomial,
                                 PmfTable, GridDensity, Truncated>;

    // Checks parameters, normalizes tables/grids; throws ValidationError.
    static DistributionSpec validate(Variant v);

    static DistributionSpec normal(double mu, double sigma2);
    static DistributionSpec exponential(double mean);
    static DistributionSpec gamma(double alpha, double beta);
    static DistributionSpec beta(double alpha, double beta);
    static DistributionSpec uniform(double a, double b);
    static DistributionSpec laplace(double scale);
    static DistributionSpec pareto(double alpha, double beta);
    static DistributionSpec cauchy(double loc, double scale);
    static DistributionSpec chi_square(long long k);
    static DistributionSpec bernoulli(double p);
    static DistributionSpec geometric(double p);
    static DistributionSpec discrete_uniform(long long n);
    static DistributionSpec zipf(double alpha, long long n);
    static DistributionSpec zeta(double alpha);
    static DistributionSpec poisson(double lambda);
    static DistributionSpec cmp(double lambda, long long nu);
    static DistributionSpec binomial(long long n, double p);
    static DistributionSpec pmf(std::vector<std::pair<double, double>> atoms);
    static DistributionSpec grid(std::vector<double> points, std::vector<double> values);
    static DistributionSpec truncated(DistributionSpec inner, double lo, double hi);

    const Variant& value() const { return v_; }
    template <class T> const T* get_if() const { return std::get_if<T>(&v_); }

    std::string kind() const;
    bool is_discrete() const;

    // pmf at an atom (discrete) or pdf (a.c.); 0 outside the support.
    double eval(double x) const;
    double log_eval(double x) const;

    // P((-inf, x]).
    double cdf(double x) const;
    // P((a, b]); b may be +inf.  Throws ArgumentError if a >= b.
    double interval_prob(double a, double b) const;
    // P([a, b)) - the dyadic engine's left-closed cells.
    double interval_co(double a, double b) const;
    // P((x, inf)).
    double tail_above(double x) const;

    SupportDescriptor support() const;

    // Smallest x with cdf(x) >= u.  Discrete kinds enumerate (capped), so for
    // very heavy tails the result may undershoot; window builders treat it as
    // a lower bound and track tail mass separately.
    double quantile(double u) const;

    std::optional<double> mean() const;
    std::optional<double> variance() const;

    // Discrete kinds only: exact mass at x (0 when x is not an atom).
    double atom_mass(double x) const;

    // Discrete kinds only: appends atoms in ascending order until the
    // remaining tail mass is below tail_cut or cap atoms were emitted.
    // Returns the bound on the mass left out.
    double enumerate_atoms(double tail_cut, std::size_t cap,
                           std::vector<std::pair<double, double>>& out) const;

    // Canonical encoding used for ordering and byte-identical output.
    std::string canonical_json() const;

    bool operator==(const DistributionSpec& o) const {
        return canonical_json() == o.canonical_json();
    }

private:
    explicit DistributionSpec(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

}  // namespace conflate
