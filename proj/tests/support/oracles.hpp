#pragma once

// Test-side numerical oracles, independent of the library's engines: adaptive
// Simpson quadrature for integrals and random family draws for property
// tests.  Keep this file free of calls into the conflation engines so the
// dual-route checks stay meaningful.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "conflate/distribution.hpp"
#include "conflate/rng.hpp"

namespace testsupport {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b].
template <class F>
double integrate(F f, double a, double b, double tol = 1e-12, int depth = 40) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Deterministic uniform/int draws for test generators.
struct Draw {
    std::uint64_t seed;
    std::uint64_t stream = 0;
    std::uint64_t counter = 0;

    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * conflate::rng::uniform(seed, stream, counter++);
    }
    long long integer(long long lo, long long hi) {  // inclusive
        return lo + (long long)(uniform() * double(hi - lo + 1));
    }
};

// One random member of the named closure family, with parameter ranges kept
// inside what the enumeration/window budgets handle comfortably.
inline conflate::DistributionSpec random_family_member(const std::string& family, Draw& d) {
    using S = conflate::DistributionSpec;
    if (family == "bernoulli") return S::bernoulli(d.uniform(0.05, 0.95));
    if (family == "geometric") return S::geometric(d.uniform(0.15, 0.9));
    if (family == "discrete_uniform") return S::discrete_uniform(d.integer(2, 40));
    if (family == "zipf") return S::zipf(d.uniform(0.6, 2.5), d.integer(5, 200));
    if (family == "zeta") return S::zeta(d.uniform(1.7, 3.0));
    if (family == "gamma") return S::gamma(d.uniform(0.8, 4.0), d.uniform(0.3, 3.0));
    if (family == "beta") return S::beta(d.uniform(0.9, 5.0), d.uniform(0.9, 5.0));
    if (family == "uniform") {
        double a = d.uniform(-1.0, 0.0);
        return S::uniform(a, d.uniform(0.5, 2.0));
    }
    if (family == "laplace") return S::laplace(d.uniform(0.4, 3.0));
    if (family == "pareto") return S::pareto(d.uniform(1.2, 3.0), d.uniform(0.5, 2.0));
    if (family == "exponential") return S::exponential(d.uniform(0.3, 3.0));
    if (family == "normal") return S::normal(d.uniform(-2.0, 2.0), d.uniform(0.3, 3.0));
    if (family == "poisson") return S::poisson(d.uniform(0.5, 15.0));
    throw std::logic_error("random_family_member: unknown family " + family);
}

// The eleven families with a same-family closure rule, in rule order.
inline const std::vector<std::string>& closure_families() {
    static const std::vector<std::string> fams = {
        "bernoulli", "geometric", "discrete_uniform", "zipf",  "zeta",       "gamma",
        "beta",      "uniform",   "laplace",          "pareto", "exponential"};
    return fams;
}

// Triples whose pairwise (second, third) conflation has exactly representable
// parameters, so nested and flat evaluation see the same real numbers.
inline std::vector<conflate::DistributionSpec> exact_triple(const std::string& fam, Draw& d) {
    using S = conflate::DistributionSpec;
    auto dyadic = [&](double lo, double hi) {
        return lo + double(d.integer(0, (long long)((hi - lo) * 16))) / 16.0;
    };
    auto pow2 = [&] { return std::ldexp(1.0, int(d.integer(-2, 2))); };
    if (fam == "bernoulli")
        return {S::bernoulli(double(d.integer(1, 255)) / 256.0), S::bernoulli(0.25),
                S::bernoulli(0.5)};
    if (fam == "geometric")
        return {S::geometric(double(d.integer(1, 255)) / 256.0),
                S::geometric(double(d.integer(1, 255)) / 256.0),
                S::geometric(double(d.integer(1, 255)) / 256.0)};
    if (fam == "discrete_uniform")
        return {S::discrete_uniform(d.integer(2, 60)), S::discrete_uniform(d.integer(2, 60)),
                S::discrete_uniform(d.integer(2, 60))};
    if (fam == "zipf") {
        return {S::zipf(dyadic(0.25, 2.0), d.integer(5, 60)),
                S::zipf(dyadic(0.25, 2.0), d.integer(5, 60)),
                S::zipf(dyadic(0.25, 2.0), d.integer(5, 60))};
    }
    if (fam == "zeta")
        return {S::zeta(1.0 + dyadic(0.25, 1.5)), S::zeta(1.0 + dyadic(0.25, 1.5)),
                S::zeta(1.0 + dyadic(0.25, 1.5))};
    if (fam == "beta")
        return {S::beta(1.0 + dyadic(0, 3), 1.0 + dyadic(0, 3)),
                S::beta(1.0 + dyadic(0, 3), 1.0 + dyadic(0, 3)),
                S::beta(1.0 + dyadic(0, 3), 1.0 + dyadic(0, 3))};
    if (fam == "uniform") {
        auto u = [&] { return S::uniform(dyadic(-2, 0), dyadic(0.25, 2)); };
        return {u(), u(), u()};
    }
    if (fam == "pareto")
        return {S::pareto(dyadic(0.5, 3), pow2()), S::pareto(dyadic(0.5, 3), pow2()),
                S::pareto(dyadic(0.5, 3), pow2())};
    // reciprocal-rule families: the inner pair shares a power-of-two scale
    if (fam == "gamma") {
        double e = pow2();
        return {S::gamma(1.0 + dyadic(0, 3), pow2()), S::gamma(1.0 + dyadic(0, 3), e),
                S::gamma(1.0 + dyadic(0, 3), e)};
    }
    if (fam == "laplace") {
        double e = pow2();
        return {S::laplace(pow2()), S::laplace(e), S::laplace(e)};
    }
    if (fam == "exponential") {
        double e = pow2();
        return {S::exponential(pow2()), S::exponential(e), S::exponential(e)};
    }
    if (fam == "normal") {
        double e = pow2();
        return {S::normal(dyadic(-2, 2), pow2()), S::normal(dyadic(-2, 2), e),
                S::normal(dyadic(-2, 2), e)};
    }
    throw std::logic_error("exact_triple: unknown family " + fam);
}


}  // namespace testsupport
