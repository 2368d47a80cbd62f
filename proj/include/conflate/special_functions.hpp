#pragma once

#include <cstddef>
#include <vector>

// Scalar special functions backing the distribution catalog.  Everything here
// is pure and double-precision; accuracy targets are ~1e-14 relative, which
// the library's tightest tolerances (1e-12 absolute on probabilities) need.

namespace conflate::sf {

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Standard normal density and CDF.
double normal_pdf(double z);
double normal_cdf(double z);

// Inverse standard normal CDF, Wichura's algorithm AS 241 (double precision).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a,x); series for x < a+1, Lentz
// continued fraction otherwise.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b) via the textbook continued fraction.
double beta_inc(double a, double b, double x);

double log_beta(double a, double b);

// Riemann zeta(s) for s > 1, Euler-Maclaurin with N=24 terms.
double zeta(double s);

// Tail sum Σ_{k>=m} k^-s for s > 1, m >= 1, by the same expansion.
double zeta_tail(double s, long long m);

// Generalized harmonic number Σ_{k=1..n} k^-s.
double harmonic(double s, long long n);

// log(Σ exp(v_i)); returns -inf for an empty or all -inf input.
double log_sum_exp(const std::vector<double>& v);

// Monotone-increasing scalar root solve of f(x)=target on [lo,hi] by
// bisection with a Newton-ish secant speedup.  f must be nondecreasing.
template <class F>
double solve_increasing(F&& f, double target, double lo, double hi, int iters = 200) {
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid) - target;
        if (fm < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace conflate::sf
