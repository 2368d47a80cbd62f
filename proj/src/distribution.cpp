#include "conflate/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "conflate/special_functions.hpp"

namespace conflate {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool is_integer(double x) {
    return std::isfinite(x) && std::floor(x) == x && std::fabs(x) < 9.007199254740992e15;
}

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

double pow1m(double p, double k) {  // (1-p)^k, stable for small p
    return std::exp(k * std::log1p(-p));
}

// Bracketed Newton solve of cdf(x) = u; falls back to bisection whenever a
// step leaves the bracket.
template <class Cdf, class Pdf>
double newton_quantile(double u, double lo, double hi, double x0, Cdf cdf, Pdf pdf) {
    double x = std::min(std::max(x0, lo), hi);
    if (!(x > lo) || !(x < hi)) x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        double f = cdf(x) - u;
        if (f > 0.0) hi = x; else lo = x;
        double d = pdf(x);
        double xn = d > 0.0 ? x - f / d : x;
        if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-15 * (std::fabs(x) + 1e-300)) return xn;
        x = xn;
    }
    return x;
}

double binomial_pmf(long long n, double p, long long k) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    double lc = std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) -
                std::lgamma(double(n - k + 1));
    return std::exp(lc + k * std::log(p) + double(n - k) * std::log1p(-p));
}

double cmp_log_pmf_raw(double lambda, long long nu, long long k) {
    return double(k) * std::log(lambda) - double(nu) * std::lgamma(double(k + 1));
}

// log Σ_k λ^k/(k!)^ν, summed around the mode.
double cmp_log_norm(double lambda, long long nu) {
    long long mode = std::llround(std::pow(lambda, 1.0 / double(nu)));
    double lmax = cmp_log_pmf_raw(lambda, nu, std::max(mode, 0ll));
    double sum = 0.0;
    long long k = 0;
    for (; k < 2000000; ++k) {
        double t = std::exp(cmp_log_pmf_raw(lambda, nu, k) - lmax);
        sum += t;
        if (k > mode && t < sum * 1e-18) break;
    }
    require(k < 2000000, "cmp: normalizing series did not converge within the term budget");
    return lmax + std::log(sum);
}

// Quadrature moments for the truncated wrapper (continuous inner).
void trunc_moments_ac(const Truncated& t, double& m1, double& m2) {
    const DistributionSpec& in = *t.inner;
    double lo = std::max(t.lo, in.quantile(1e-13));
    double hi = std::min(t.hi, in.quantile(1.0 - 1e-13));
    const int n = 200001;
    double h = (hi - lo) / (n - 1);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = lo + h * i;
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        double f = in.eval(x) * w;
        s0 += f;
        s1 += f * x;
        s2 += f * x * x;
    }
    m1 = s1 / s0;
    m2 = s2 / s0;
}

}  // namespace

std::pair<double, double> SupportDescriptor::hull() const {
    switch (kind) {
        case Kind::finite_atoms:
            return {atoms.front(), atoms.back()};
        case Kind::integer_lattice:
            return {double(lattice_lo),
                    lattice_hi == lattice_unbounded ? inf : double(lattice_hi)};
        case Kind::interval:
        default:
            return {lo, hi};
    }
}

bool SupportDescriptor::contains_atom(double x) const {
    if (kind == Kind::finite_atoms)
        return std::binary_search(atoms.begin(), atoms.end(), x);
    if (kind == Kind::integer_lattice)
        return is_integer(x) && x >= double(lattice_lo) &&
               (lattice_hi == lattice_unbounded || x <= double(lattice_hi));
    return false;
}

// --- validation ---------------------------------------------------------------

DistributionSpec DistributionSpec::validate(Variant v) {
    std::visit(
        overloaded{
            [](Normal& f) {
                require(std::isfinite(f.mu) && std::isfinite(f.sigma2) && f.sigma2 > 0.0,
                        "normal: requires finite mu and sigma2 > 0");
            },
            [](Exponential& f) {
                require(std::isfinite(f.mean) && f.mean > 0.0, "exponential: requires mean > 0");
            },
            [](Gamma& f) {
                require(std::isfinite(f.alpha) && f.alpha > 0.0 && std::isfinite(f.beta) &&
                            f.beta > 0.0,
                        "gamma: requires alpha > 0 and beta > 0");
            },
            [](BetaDist& f) {
                require(std::isfinite(f.alpha) && f.alpha > 0.0 && std::isfinite(f.beta) &&
                            f.beta > 0.0,
                        "beta: requires alpha > 0 and beta > 0");
            },
            [](Uniform& f) {
                require(std::isfinite(f.a) && std::isfinite(f.b) && f.a < f.b,
                        "uniform: requires a < b");
            },
            [](Laplace& f) {
                require(std::isfinite(f.scale) && f.scale > 0.0, "laplace: requires scale > 0");
            },
            [](Pareto& f) {
                require(std::isfinite(f.alpha) && f.alpha > 0.0 && std::isfinite(f.beta) &&
                            f.beta > 0.0,
                        "pareto: requires alpha > 0 and beta > 0");
            },
            [](Cauchy& f) {
                require(std::isfinite(f.loc) && std::isfinite(f.scale) && f.scale > 0.0,
                        "cauchy: requires finite loc and scale > 0");
            },
            [](ChiSquare& f) { require(f.k >= 1, "chi_square: requires k >= 1"); },
            [](Bernoulli& f) {
                require(std::isfinite(f.p) && f.p >= 0.0 && f.p <= 1.0,
                        "bernoulli: requires p in [0,1]");
            },
            [](Geometric& f) {
                require(std::isfinite(f.p) && f.p > 0.0 && f.p <= 1.0,
                        "geometric: requires p in (0,1]");
            },
            [](DiscreteUniform& f) { require(f.n >= 1, "discrete_uniform: requires n >= 1"); },
            [](Zipf& f) {
                require(std::isfinite(f.alpha) && f.alpha > 0.0 && f.n >= 1,
                        "zipf: requires alpha > 0 and n >= 1");
                f.norm = sf::harmonic(f.alpha, f.n);
            },
            [](Zeta& f) {
                require(std::isfinite(f.alpha) && f.alpha > 1.0,
                        "zeta: requires alpha > 1 (the series diverges otherwise)");
                f.norm = sf::zeta(f.alpha);
            },
            [](Poisson& f) {
                require(std::isfinite(f.lambda) && f.lambda > 0.0, "poisson: requires lambda > 0");
            },
            [](Cmp& f) {
                require(std::isfinite(f.lambda) && f.lambda > 0.0 && f.nu >= 1,
                        "cmp: requires lambda > 0 and integer nu >= 1");
                f.log_norm = cmp_log_norm(f.lambda, f.nu);
            },
            [](Binomial& f) {
                require(f.n >= 1 && std::isfinite(f.p) && f.p >= 0.0 && f.p <= 1.0,
                        "binomial: requires n >= 1 and p in [0,1]");
            },
            [](PmfTable& f) {
                require(!f.atoms.empty(), "pmf: empty table");
                std::sort(f.atoms.begin(), f.atoms.end());
                double total = 0.0;
                for (std::size_t i = 0; i < f.atoms.size(); ++i) {
                    auto [x, m] = f.atoms[i];
                    require(std::isfinite(x), "pmf: non-finite atom value");
                    require(std::isfinite(m) && m > 0.0, "pmf: masses must be strictly positive");
                    require(i == 0 || f.atoms[i - 1].first != x, "pmf: duplicate atom value");
                    total += m;
                }
                require(std::fabs(total - 1.0) <= 1e-9,
                        "pmf: masses must sum to 1 within 1e-9");
                for (auto& [x, m] : f.atoms) m /= total;
            },
            [](GridDensity& f) {
                require(f.points.size() >= 2 && f.points.size() == f.values.size(),
                        "grid: needs matching points/values arrays with at least 2 entries");
                for (std::size_t i = 0; i < f.points.size(); ++i) {
                    require(std::isfinite(f.points[i]), "grid: non-finite point");
                    require(std::isfinite(f.values[i]) && f.values[i] >= 0.0,
                            "grid: values must be finite and nonnegative");
                    require(i == 0 || f.points[i] > f.points[i - 1],
                            "grid: points must be strictly increasing");
                }
                double norm = 0.0;
                for (std::size_t i = 0; i + 1 < f.points.size(); ++i)
                    norm += 0.5 * (f.values[i] + f.values[i + 1]) *
                            (f.points[i + 1] - f.points[i]);
                require(std::isfinite(norm) && norm > 0.0, "grid: mass must be positive");
                f.norm = norm;
                for (auto& v : f.values) v /= norm;
                f.cum.assign(f.points.size(), 0.0);
                for (std::size_t i = 0; i + 1 < f.points.size(); ++i)
                    f.cum[i + 1] = f.cum[i] + 0.5 * (f.values[i] + f.values[i + 1]) *
                                                  (f.points[i + 1] - f.points[i]);
            },
            [](Truncated& f) {
                require(f.inner != nullptr, "truncated: missing inner distribution");
                require(f.lo < f.hi, "truncated: requires lo < hi");
                const DistributionSpec& in = *f.inner;
                double mass_hi = std::isfinite(f.hi) ? in.atom_mass(f.hi) : 0.0;
                double upper = f.hi == inf ? 1.0 : in.cdf(f.hi) - mass_hi;
                double lower = f.lo == -inf ? 0.0 : in.cdf(f.lo);
                f.window_prob = upper - lower;
                require(std::isfinite(f.window_prob) && f.window_prob > 0.0,
                        "truncated: window has zero inner probability");
            }},
        v);
    return DistributionSpec(std::move(v));
}

DistributionSpec DistributionSpec::normal(double mu, double s2) { return validate(Normal{mu, s2}); }
DistributionSpec DistributionSpec::exponential(double m) { return validate(Exponential{m}); }
DistributionSpec DistributionSpec::gamma(double a, double b) { return validate(Gamma{a, b}); }
DistributionSpec DistributionSpec::beta(double a, double b) { return validate(BetaDist{a, b}); }
DistributionSpec DistributionSpec::uniform(double a, double b) { return validate(Uniform{a, b}); }
DistributionSpec DistributionSpec::laplace(double s) { return validate(Laplace{s}); }
DistributionSpec DistributionSpec::pareto(double a, double b) { return validate(Pareto{a, b}); }
DistributionSpec DistributionSpec::cauchy(double l, double s) { return validate(Cauchy{l, s}); }
DistributionSpec DistributionSpec::chi_square(long long k) { return validate(ChiSquare{k}); }
DistributionSpec DistributionSpec::bernoulli(double p) { return validate(Bernoulli{p}); }
DistributionSpec DistributionSpec::geometric(double p) { return validate(Geometric{p}); }
DistributionSpec DistributionSpec::discrete_uniform(long long n) {
    return validate(DiscreteUniform{n});
}
DistributionSpec DistributionSpec::zipf(double a, long long n) { return validate(Zipf{a, n}); }
DistributionSpec DistributionSpec::zeta(double a) { return validate(Zeta{a}); }
DistributionSpec DistributionSpec::poisson(double l) { return validate(Poisson{l}); }
DistributionSpec DistributionSpec::cmp(double l, long long nu) { return validate(Cmp{l, nu}); }
DistributionSpec DistributionSpec::binomial(long long n, double p) {
    return validate(Binomial{n, p});
}
DistributionSpec DistributionSpec::pmf(std::vector<std::pair<double, double>> atoms) {
    return validate(PmfTable{std::move(atoms)});
}
DistributionSpec DistributionSpec::grid(std::vector<double> pts, std::vector<double> vals) {
    return validate(GridDensity{std::move(pts), std::move(vals), 0.0, {}});
}
DistributionSpec DistributionSpec::truncated(DistributionSpec inner, double lo, double hi) {
    return validate(Truncated{std::make_shared<const DistributionSpec>(std::move(inner)), lo, hi, 0.0});
}

// --- basic queries -------------------------------------------------------------

std::string DistributionSpec::kind() const {
    return std::visit(overloaded{[](const Normal&) { return "normal"; },
                                 [](const Exponential&) { return "exponential"; },
                                 [](const Gamma&) { return "gamma"; },
                                 [](const BetaDist&) { return "beta"; },
                                 [](const Uniform&) { return "uniform"; },
                                 [](const Laplace&) { return "laplace"; },
                                 [](const Pareto&) { return "pareto"; },
                                 [](const Cauchy&) { return "cauchy"; },
                                 [](const ChiSquare&) { return "chi_square"; },
                                 [](const Bernoulli&) { return "bernoulli"; },
                                 [](const Geometric&) { return "geometric"; },
                                 [](const DiscreteUniform&) { return "discrete_uniform"; },
                                 [](const Zipf&) { return "zipf"; },
                                 [](const Zeta&) { return "zeta"; },
                                 [](const Poisson&) { return "poisson"; },
                                 [](const Cmp&) { return "cmp"; },
                                 [](const Binomial&) { return "binomial"; },
                                 [](const PmfTable&) { return "pmf"; },
                                 [](const GridDensity&) { return "grid"; },
                                 [](const Truncated&) { return "truncated"; }},
                      v_);
}

bool DistributionSpec::is_discrete() const {
    return std::visit(
        overloaded{[](const Bernoulli&) { return true; }, [](const Geometric&) { return true; },
                   [](const DiscreteUniform&) { return true; }, [](const Zipf&) { return true; },
                   [](const Zeta&) { return true; }, [](const Poisson&) { return true; },
                   [](const Cmp&) { return true; }, [](const Binomial&) { return true; },
                   [](const PmfTable&) { return true; },
                   [](const Truncated& t) { return t.inner->is_discrete(); },
                   [](const auto&) { return false; }},
        v_);
}

// --- density / mass -------------------------------------------------------------

double DistributionSpec::eval(double x) const {
    return std::visit(
        overloaded{
            [&](const Normal& f) {
                double s = std::sqrt(f.sigma2);
                return sf::normal_pdf((x - f.mu) / s) / s;
            },
            [&](const Exponential& f) {
                return x > 0.0 ? std::exp(-x / f.mean) / f.mean : 0.0;
            },
            [&](const Gamma& f) {
                if (x <= 0.0) return 0.0;
                return std::exp((f.alpha - 1.0) * std::log(x) - x / f.beta -
                                std::lgamma(f.alpha) - f.alpha * std::log(f.beta));
            },
            [&](const BetaDist& f) {
                if (x <= 0.0 || x >= 1.0) return 0.0;
                return std::exp((f.alpha - 1.0) * std::log(x) +
                                (f.beta - 1.0) * std::log1p(-x) - sf::log_beta(f.alpha, f.beta));
            },
            [&](const Uniform& f) { return x > f.a && x < f.b ? 1.0 / (f.b - f.a) : 0.0; },
            [&](const Laplace& f) {
                return std::exp(-std::fabs(x) / f.scale) / (2.0 * f.scale);
            },
            [&](const Pareto& f) {
                if (x <= f.beta) return 0.0;
                return std::exp(std::log(f.alpha) + f.alpha * std::log(f.beta) -
                                (f.alpha + 1.0) * std::log(x));
            },
            [&](const Cauchy& f) {
                double d = x - f.loc;
                return f.scale / (sf::pi * (f.scale * f.scale + d * d));
            },
            [&](const ChiSquare& f) {
                if (x <= 0.0) return 0.0;
                double a = 0.5 * f.k;
                return std::exp((a - 1.0) * std::log(x) - 0.5 * x - std::lgamma(a) -
                                a * std::log(2.0));
            },
            [&](const Bernoulli& f) {
                if (x == 0.0) return 1.0 - f.p;
                if (x == 1.0) return f.p;
                return 0.0;
            },
            [&](const Geometric& f) {
                if (!is_integer(x) || x < 1.0) return 0.0;
                return f.p * pow1m(f.p, x - 1.0);
            },
            [&](const DiscreteUniform& f) {
                return is_integer(x) && x >= 1.0 && x <= double(f.n) ? 1.0 / double(f.n) : 0.0;
            },
            [&](const Zipf& f) {
                if (!is_integer(x) || x < 1.0 || x > double(f.n)) return 0.0;
                return std::pow(x, -f.alpha) / f.norm;
            },
            [&](const Zeta& f) {
                if (!is_integer(x) || x < 1.0) return 0.0;
                return std::pow(x, -f.alpha) / f.norm;
            },
            [&](const Poisson& f) {
                if (!is_integer(x) || x < 0.0) return 0.0;
                return std::exp(x * std::log(f.lambda) - f.lambda - std::lgamma(x + 1.0));
            },
            [&](const Cmp& f) {
                if (!is_integer(x) || x < 0.0) return 0.0;
                return std::exp(x * std::log(f.lambda) - double(f.nu) * std::lgamma(x + 1.0) -
                                f.log_norm);
            },
            [&](const Binomial& f) {
                if (!is_integer(x)) return 0.0;
                return binomial_pmf(f.n, f.p, (long long)x);
            },
            [&](const PmfTable& f) {
                auto it = std::lower_bound(f.atoms.begin(), f.atoms.end(),
                                           std::make_pair(x, -1.0));
                return it != f.atoms.end() && it->first == x ? it->second : 0.0;
            },
            [&](const GridDensity& f) {
                if (x < f.points.front() || x > f.points.back()) return 0.0;
                auto it = std::upper_bound(f.points.begin(), f.points.end(), x);
                if (it == f.points.begin()) return f.values.front();
                if (it == f.points.end()) return f.values.back();
                std::size_t i = std::size_t(it - f.points.begin()) - 1;
                double t = (x - f.points[i]) / (f.points[i + 1] - f.points[i]);
                return f.values[i] + t * (f.values[i + 1] - f.values[i]);
            },
            [&](const Truncated& f) {
                if (x <= f.lo || x >= f.hi) return 0.0;
                return f.inner->eval(x) / f.window_prob;
            }},
        v_);
}

double DistributionSpec::log_eval(double x) const {
    // Families whose density underflows double range benefit from a direct
    // log path; the rest just wrap eval.
    if (const auto* f = get_if<Normal>()) {
        double s2 = f->sigma2;
        double d = x - f->mu;
        return -0.5 * d * d / s2 - 0.5 * std::log(2.0 * sf::pi * s2);
    }
    if (const auto* f = get_if<Gamma>()) {
        if (x <= 0.0) return -inf;
        return (f->alpha - 1.0) * std::log(x) - x / f->beta - std::lgamma(f->alpha) -
               f->alpha * std::log(f->beta);
    }
    if (const auto* f = get_if<Exponential>()) {
        return x > 0.0 ? -x / f->mean - std::log(f->mean) : -inf;
    }
    if (const auto* f = get_if<Laplace>()) {
        return -std::fabs(x) / f->scale - std::log(2.0 * f->scale);
    }
    if (const auto* f = get_if<BetaDist>()) {
        if (x <= 0.0 || x >= 1.0) return -inf;
        return (f->alpha - 1.0) * std::log(x) + (f->beta - 1.0) * std::log1p(-x) -
               sf::log_beta(f->alpha, f->beta);
    }
    if (const auto* f = get_if<Truncated>()) {
        if (x <= f->lo || x >= f->hi) return -inf;
        return f->inner->log_eval(x) - std::log(f->window_prob);
    }
    double v = eval(x);
    return v > 0.0 ? std::log(v) : -inf;
}

// --- cdf and interval probabilities ----------------------------------------------

double DistributionSpec::cdf(double x) const {
    if (std::isnan(x)) throw ArgumentError("cdf: NaN argument");
    if (x == inf) return 1.0;
    if (x == -inf) return 0.0;
    return std::visit(
        overloaded{
            [&](const Normal& f) { return sf::normal_cdf((x - f.mu) / std::sqrt(f.sigma2)); },
            [&](const Exponential& f) { return x <= 0.0 ? 0.0 : -std::expm1(-x / f.mean); },
            [&](const Gamma& f) { return x <= 0.0 ? 0.0 : sf::gamma_p(f.alpha, x / f.beta); },
            [&](const BetaDist& f) { return sf::beta_inc(f.alpha, f.beta, x); },
            [&](const Uniform& f) {
                return std::min(1.0, std::max(0.0, (x - f.a) / (f.b - f.a)));
            },
            [&](const Laplace& f) {
                return x < 0.0 ? 0.5 * std::exp(x / f.scale)
                               : 1.0 - 0.5 * std::exp(-x / f.scale);
            },
            [&](const Pareto& f) {
                return x <= f.beta ? 0.0 : -std::expm1(f.alpha * std::log(f.beta / x));
            },
            [&](const Cauchy& f) {
                return 0.5 + std::atan((x - f.loc) / f.scale) / sf::pi;
            },
            [&](const ChiSquare& f) {
                return x <= 0.0 ? 0.0 : sf::gamma_p(0.5 * f.k, 0.5 * x);
            },
            [&](const Bernoulli& f) {
                if (x < 0.0) return 0.0;
                if (x < 1.0) return 1.0 - f.p;
                return 1.0;
            },
            [&](const Geometric& f) {
                double k = std::floor(x);
                return k < 1.0 ? 0.0 : 1.0 - pow1m(f.p, k);
            },
            [&](const DiscreteUniform& f) {
                double k = std::floor(x);
                if (k < 1.0) return 0.0;
                return std::min(1.0, k / double(f.n));
            },
            [&](const Zipf& f) {
                double k = std::floor(x);
                if (k < 1.0) return 0.0;
                if (k >= double(f.n)) return 1.0;
                return sf::harmonic(f.alpha, (long long)k) / f.norm;
            },
            [&](const Zeta& f) {
                double k = std::floor(x);
                if (k < 1.0) return 0.0;
                return 1.0 - sf::zeta_tail(f.alpha, (long long)k + 1) / f.norm;
            },
            [&](const Poisson& f) {
                double k = std::floor(x);
                return k < 0.0 ? 0.0 : sf::gamma_q(k + 1.0, f.lambda);
            },
            [&](const Cmp& f) {
                double kf = std::floor(x);
                if (kf < 0.0) return 0.0;
                long long k = (long long)std::min(kf, 4.0e6);
                double s = 0.0;
                for (long long j = 0; j <= k; ++j) {
                    double t = std::exp(cmp_log_pmf_raw(f.lambda, f.nu, j) - f.log_norm);
                    s += t;
                    if (j > 4 && t < 1e-18 && s > 1.0 - 1e-15) break;
                }
                return std::min(s, 1.0);
            },
            [&](const Binomial& f) {
                double kf = std::floor(x);
                if (kf < 0.0) return 0.0;
                if (kf >= double(f.n)) return 1.0;
                long long k = (long long)kf;
                if (f.p <= 0.0) return 1.0;
                if (f.p >= 1.0) return 0.0;
                return sf::beta_inc(double(f.n - k), double(k + 1), 1.0 - f.p);
            },
            [&](const PmfTable& f) {
                double s = 0.0;
                for (const auto& [v, m] : f.atoms) {
                    if (v > x) break;
                    s += m;
                }
                return s;
            },
            [&](const GridDensity& f) {
                if (x <= f.points.front()) return 0.0;
                if (x >= f.points.back()) return 1.0;
                auto it = std::upper_bound(f.points.begin(), f.points.end(), x);
                std::size_t i = std::size_t(it - f.points.begin()) - 1;
                double h = f.points[i + 1] - f.points[i];
                double t = x - f.points[i];
                double slope = (f.values[i + 1] - f.values[i]) / h;
                return f.cum[i] + f.values[i] * t + 0.5 * slope * t * t;
            },
            [&](const Truncated& f) {
                if (x <= f.lo) return 0.0;
                if (x >= f.hi) return 1.0;
                double lower = f.lo == -inf ? 0.0 : f.inner->cdf(f.lo);
                return std::min(1.0, (f.inner->cdf(x) - lower) / f.window_prob);
            }},
        v_);
}

double DistributionSpec::atom_mass(double x) const {
    if (!is_discrete()) return 0.0;
    return eval(x);
}

// Upper tail P((x, inf)) computed without the 1 - cdf cancellation, so
// interval probabilities deep in either tail stay accurate.
double DistributionSpec::tail_above(double x) const {
    if (std::isnan(x)) throw ArgumentError("tail_above: NaN argument");
    if (x == inf) return 0.0;
    if (x == -inf) return 1.0;
    return std::visit(
        overloaded{
            [&](const Normal& f) {
                return sf::normal_cdf(-(x - f.mu) / std::sqrt(f.sigma2));
            },
            [&](const Exponential& f) { return x <= 0.0 ? 1.0 : std::exp(-x / f.mean); },
            [&](const Gamma& f) { return x <= 0.0 ? 1.0 : sf::gamma_q(f.alpha, x / f.beta); },
            [&](const BetaDist& f) {
                if (x <= 0.0) return 1.0;
                if (x >= 1.0) return 0.0;
                return sf::beta_inc(f.beta, f.alpha, 1.0 - x);
            },
            [&](const Uniform& f) {
                return std::min(1.0, std::max(0.0, (f.b - x) / (f.b - f.a)));
            },
            [&](const Laplace& f) {
                return x >= 0.0 ? 0.5 * std::exp(-x / f.scale)
                                : 1.0 - 0.5 * std::exp(x / f.scale);
            },
            [&](const Pareto& f) {
                return x <= f.beta ? 1.0 : std::exp(f.alpha * std::log(f.beta / x));
            },
            [&](const Cauchy& f) {
                double d = (x - f.loc) / f.scale;
                // atan(d) + atan(1/d) = pi/2 keeps the far tails precise
                if (d > 1.0) return std::atan(1.0 / d) / sf::pi;
                if (d < -1.0) return 1.0 - std::atan(-1.0 / d) / sf::pi;
                return 0.5 - std::atan(d) / sf::pi;
            },
            [&](const ChiSquare& f) {
                return x <= 0.0 ? 1.0 : sf::gamma_q(0.5 * f.k, 0.5 * x);
            },
            [&](const Bernoulli& f) {
                if (x < 0.0) return 1.0;
                if (x < 1.0) return f.p;
                return 0.0;
            },
            [&](const Geometric& f) {
                double k = std::floor(x);
                return k < 1.0 ? 1.0 : pow1m(f.p, k);
            },
            [&](const DiscreteUniform& f) {
                double k = std::floor(x);
                if (k < 0.0) return 1.0;
                return std::max(0.0, double(f.n) - k) / double(f.n);
            },
            [&](const Zipf& f) {
                double k = std::floor(x);
                if (k < 1.0) return 1.0;
                if (k >= double(f.n)) return 0.0;
                return (sf::zeta_tail(f.alpha, (long long)k + 1) -
                        sf::zeta_tail(f.alpha, f.n + 1)) /
                       f.norm;
            },
            [&](const Zeta& f) {
                double k = std::floor(x);
                return k < 1.0 ? 1.0 : sf::zeta_tail(f.alpha, (long long)k + 1) / f.norm;
            },
            [&](const Poisson& f) {
                double k = std::floor(x);
                return k < 0.0 ? 1.0 : sf::gamma_p(k + 1.0, f.lambda);
            },
            [&](const Cmp& f) {
                double kf = std::floor(x);
                if (kf < 0.0) return 1.0;
                long long k = (long long)kf;
                double s = 0.0;
                for (long long j = k + 1; j < k + 2000000; ++j) {
                    double t = std::exp(cmp_log_pmf_raw(f.lambda, f.nu, j) - f.log_norm);
                    s += t;
                    if (t < s * 1e-18 && double(j) > std::pow(f.lambda, 1.0 / double(f.nu)))
                        break;
                }
                return std::min(s, 1.0);
            },
            [&](const Binomial& f) {
                double kf = std::floor(x);
                if (kf < 0.0) return 1.0;
                if (kf >= double(f.n)) return 0.0;
                long long k = (long long)kf;
                if (f.p <= 0.0) return 0.0;
                if (f.p >= 1.0) return 1.0;
                // P(X > k) = I_p(k+1, n-k)
                return sf::beta_inc(double(k + 1), double(f.n - k), f.p);
            },
            [&](const PmfTable& f) {
                double s = 0.0;
                for (auto it = f.atoms.rbegin(); it != f.atoms.rend(); ++it) {
                    if (it->first <= x) break;
                    s += it->second;
                }
                return s;
            },
            [&](const GridDensity&) { return std::max(0.0, 1.0 - cdf(x)); },
            [&](const Truncated& f) {
                if (x <= f.lo) return 1.0;
                if (x >= f.hi) return 0.0;
                double upper =
                    f.hi == inf ? 0.0 : f.inner->tail_above(f.hi) + f.inner->atom_mass(f.hi);
                return std::max(0.0, (f.inner->tail_above(x) - upper) / f.window_prob);
            }},
        v_);
}

double DistributionSpec::interval_prob(double a, double b) const {
    if (!(a < b)) throw ArgumentError("interval_prob: requires a < b");
    double lo_cdf = a == -inf ? 0.0 : cdf(a);
    if (lo_cdf <= 0.5) {
        double hi_cdf = b == inf ? 1.0 : cdf(b);
        return std::max(0.0, hi_cdf - lo_cdf);
    }
    // both endpoints sit in the upper tail: difference of survivals
    double sa = tail_above(a);
    double sb = b == inf ? 0.0 : tail_above(b);
    return std::max(0.0, sa - sb);
}

double DistributionSpec::interval_co(double a, double b) const {
    if (!(a < b)) throw ArgumentError("interval_co: requires a < b");
    double lo_cdf = a == -inf ? 0.0 : cdf(a);
    if (lo_cdf <= 0.5) {
        double hi = b == inf ? 1.0 : cdf(b) - atom_mass(b);
        double lo = a == -inf ? 0.0 : lo_cdf - atom_mass(a);
        return std::max(0.0, hi - lo);
    }
    double sa = a == -inf ? 1.0 : tail_above(a) + atom_mass(a);
    double sb = b == inf ? 0.0 : tail_above(b) + atom_mass(b);
    return std::max(0.0, sa - sb);
}

// --- support -------------------------------------------------------------------

SupportDescriptor DistributionSpec::support() const {
    SupportDescriptor d;
    std::visit(
        overloaded{
            [&](const Normal&) { d.kind = SupportDescriptor::Kind::interval; },
            [&](const Cauchy&) { d.kind = SupportDescriptor::Kind::interval; },
            [&](const Laplace&) { d.kind = SupportDescriptor::Kind::interval; },
            [&](const Exponential&) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = 0.0;
            },
            [&](const Gamma&) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = 0.0;
            },
            [&](const ChiSquare&) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = 0.0;
            },
            [&](const BetaDist&) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = 0.0;
                d.hi = 1.0;
            },
            [&](const Uniform& f) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = f.a;
                d.hi = f.b;
            },
            [&](const Pareto& f) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = f.beta;
            },
            [&](const GridDensity& f) {
                d.kind = SupportDescriptor::Kind::interval;
                d.lo = f.points.front();
                d.hi = f.points.back();
            },
            [&](const Bernoulli& f) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = f.p >= 1.0 ? 1 : 0;
                d.lattice_hi = f.p <= 0.0 ? 0 : 1;
            },
            [&](const Geometric& f) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = 1;
                d.lattice_hi = f.p >= 1.0 ? 1 : lattice_unbounded;
            },
            [&](const DiscreteUniform& f) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = 1;
                d.lattice_hi = f.n;
            },
            [&](const Zipf& f) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = 1;
                d.lattice_hi = f.n;
            },
            [&](const Zeta&) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = 1;
            },
            [&](const Poisson&) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = 0;
            },
            [&](const Cmp&) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = 0;
            },
            [&](const Binomial& f) {
                d.kind = SupportDescriptor::Kind::integer_lattice;
                d.lattice_lo = f.p >= 1.0 ? f.n : 0;
                d.lattice_hi = f.p <= 0.0 ? 0 : f.n;
            },
            [&](const PmfTable& f) {
                d.kind = SupportDescriptor::Kind::finite_atoms;
                d.atoms.reserve(f.atoms.size());
                for (const auto& [x, m] : f.atoms) d.atoms.push_back(x);
            },
            [&](const Truncated& f) {
                d = f.inner->support();
                if (d.kind == SupportDescriptor::Kind::interval) {
                    d.lo = std::max(d.lo, f.lo);
                    d.hi = std::min(d.hi, f.hi);
                } else if (d.kind == SupportDescriptor::Kind::integer_lattice) {
                    double lo_int = std::floor(f.lo) + 1.0;  // smallest integer > lo
                    double hi_int = std::ceil(f.hi) - 1.0;   // largest integer < hi
                    if (f.lo != -inf)
                        d.lattice_lo = std::max(d.lattice_lo, (long long)lo_int);
                    if (f.hi != inf && d.lattice_hi != lattice_unbounded)
                        d.lattice_hi = std::min(d.lattice_hi, (long long)hi_int);
                    else if (f.hi != inf)
                        d.lattice_hi = (long long)hi_int;
                } else {
                    std::vector<double> kept;
                    for (double x : d.atoms)
                        if (x > f.lo && x < f.hi) kept.push_back(x);
                    d.atoms = std::move(kept);
                }
            }},
        v_);
    return d;
}

// --- quantiles -----------------------------------------------------------------

double DistributionSpec::quantile(double u) const {
    auto h = support().hull();
    if (u <= 0.0) return h.first;
    if (u >= 1.0) return h.second;
    if (const auto* f = get_if<Normal>())
        return f->mu + std::sqrt(f->sigma2) * sf::normal_quantile(u);
    if (const auto* f = get_if<Exponential>()) return -f->mean * std::log1p(-u);
    if (const auto* f = get_if<Uniform>()) return f->a + u * (f->b - f->a);
    if (const auto* f = get_if<Laplace>())
        return u < 0.5 ? f->scale * std::log(2.0 * u) : -f->scale * std::log(2.0 * (1.0 - u));
    if (const auto* f = get_if<Pareto>())
        return f->beta * std::exp(-std::log1p(-u) / f->alpha);
    if (const auto* f = get_if<Cauchy>())
        return f->loc + f->scale * std::tan(sf::pi * (u - 0.5));
    if (const auto* f = get_if<Gamma>()) {
        // Wilson-Hilferty start, then bracketed Newton.
        double z = sf::normal_quantile(u);
        double c = 1.0 - 1.0 / (9.0 * f->alpha) + z / (3.0 * std::sqrt(f->alpha));
        double x0 = f->alpha * f->beta * c * c * c;
        double hi2 = f->beta * (f->alpha + 40.0 * std::sqrt(f->alpha) + 40.0);
        return newton_quantile(u, 0.0, hi2, x0, [&](double x) { return cdf(x); },
                               [&](double x) { return eval(x); });
    }
    if (get_if<BetaDist>() || get_if<ChiSquare>() || get_if<GridDensity>()) {
        auto [lo, hi2] = h;
        if (const auto* c = get_if<ChiSquare>()) hi2 = double(c->k) + 45.0 * std::sqrt(2.0 * c->k) + 45.0;
        double x0 = 0.5 * (lo + std::min(hi2, lo + 1.0));
        if (const auto* g = get_if<GridDensity>()) {
            // locate the cell by cumulative mass first
            auto it = std::upper_bound(g->cum.begin(), g->cum.end(), u);
            std::size_t i = std::min<std::size_t>(g->cum.size() - 1,
                                                  std::size_t(it - g->cum.begin()));
            if (i > 0) --i;
            lo = g->points[i];
            hi2 = g->points[std::min(i + 1, g->points.size() - 1)];
            x0 = 0.5 * (lo + hi2);
        }
        return newton_quantile(u, lo, hi2, x0, [&](double x) { return cdf(x); },
                               [&](double x) { return eval(x); });
    }
    if (const auto* f = get_if<Truncated>()) {
        double lower = f->lo == -inf ? 0.0 : f->inner->cdf(f->lo);
        return f->inner->quantile(lower + u * f->window_prob);
    }
    if (const auto* f = get_if<Geometric>()) {
        if (f->p >= 1.0) return 1.0;
        double k = std::ceil(std::log1p(-u) / std::log1p(-f->p));
        return std::max(1.0, k);
    }
    if (const auto* f = get_if<DiscreteUniform>())
        return std::min(double(f->n), std::ceil(u * double(f->n)));
    // remaining discrete kinds: ascending scan
    std::vector<std::pair<double, double>> atoms;
    enumerate_atoms(1e-15, 4u << 20, atoms);
    double s = 0.0;
    for (const auto& [x, m] : atoms) {
        s += m;
        if (s >= u) return x;
    }
    return atoms.empty() ? h.first : atoms.back().first;
}

// --- moments -------------------------------------------------------------------

std::optional<double> DistributionSpec::mean() const {
    return std::visit(
        overloaded{
            [&](const Normal& f) -> std::optional<double> { return f.mu; },
            [&](const Exponential& f) -> std::optional<double> { return f.mean; },
            [&](const Gamma& f) -> std::optional<double> { return f.alpha * f.beta; },
            [&](const BetaDist& f) -> std::optional<double> {
                return f.alpha / (f.alpha + f.beta);
            },
            [&](const Uniform& f) -> std::optional<double> { return 0.5 * (f.a + f.b); },
            [&](const Laplace&) -> std::optional<double> { return 0.0; },
            [&](const Pareto& f) -> std::optional<double> {
                if (f.alpha <= 1.0) return std::nullopt;
                return f.alpha * f.beta / (f.alpha - 1.0);
            },
            [&](const Cauchy&) -> std::optional<double> { return std::nullopt; },
            [&](const ChiSquare& f) -> std::optional<double> { return double(f.k); },
            [&](const Bernoulli& f) -> std::optional<double> { return f.p; },
            [&](const Geometric& f) -> std::optional<double> { return 1.0 / f.p; },
            [&](const DiscreteUniform& f) -> std::optional<double> {
                return 0.5 * double(f.n + 1);
            },
            [&](const Zipf& f) -> std::optional<double> {
                return sf::harmonic(f.alpha - 1.0, f.n) / f.norm;
            },
            [&](const Zeta& f) -> std::optional<double> {
                if (f.alpha <= 2.0) return std::nullopt;
                return sf::zeta(f.alpha - 1.0) / f.norm;
            },
            [&](const Poisson& f) -> std::optional<double> { return f.lambda; },
            [&](const Binomial& f) -> std::optional<double> { return double(f.n) * f.p; },
            [&](const Cmp&) -> std::optional<double> {
                std::vector<std::pair<double, double>> atoms;
                enumerate_atoms(1e-14, 4u << 20, atoms);
                double s = 0.0;
                for (const auto& [x, m] : atoms) s += x * m;
                return s;
            },
            [&](const PmfTable& f) -> std::optional<double> {
                double s = 0.0;
                for (const auto& [x, m] : f.atoms) s += x * m;
                return s;
            },
            [&](const GridDensity& f) -> std::optional<double> {
                double s = 0.0;
                for (std::size_t i = 0; i + 1 < f.points.size(); ++i)
                    s += 0.5 * (f.points[i] * f.values[i] + f.points[i + 1] * f.values[i + 1]) *
                         (f.points[i + 1] - f.points[i]);
                return s;
            },
            [&](const Truncated& t) -> std::optional<double> {
                if (t.inner->is_discrete()) {
                    std::vector<std::pair<double, double>> atoms;
                    enumerate_atoms(1e-14, 4u << 20, atoms);
                    double s = 0.0;
                    for (const auto& [x, m] : atoms) s += x * m;
                    return s;
                }
                double m1, m2;
                trunc_moments_ac(t, m1, m2);
                return m1;
            }},
        v_);
}

std::optional<double> DistributionSpec::variance() const {
    return std::visit(
        overloaded{
            [&](const Normal& f) -> std::optional<double> { return f.sigma2; },
            [&](const Exponential& f) -> std::optional<double> { return f.mean * f.mean; },
            [&](const Gamma& f) -> std::optional<double> { return f.alpha * f.beta * f.beta; },
            [&](const BetaDist& f) -> std::optional<double> {
                double s = f.alpha + f.beta;
                return f.alpha * f.beta / (s * s * (s + 1.0));
            },
            [&](const Uniform& f) -> std::optional<double> {
                double w = f.b - f.a;
                return w * w / 12.0;
            },
            [&](const Laplace& f) -> std::optional<double> { return 2.0 * f.scale * f.scale; },
            [&](const Pareto& f) -> std::optional<double> {
                if (f.alpha <= 2.0) return std::nullopt;
                double a = f.alpha, b = f.beta;
                return a * b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
            },
            [&](const Cauchy&) -> std::optional<double> { return std::nullopt; },
            [&](const ChiSquare& f) -> std::optional<double> { return 2.0 * double(f.k); },
            [&](const Bernoulli& f) -> std::optional<double> { return f.p * (1.0 - f.p); },
            [&](const Geometric& f) -> std::optional<double> {
                return (1.0 - f.p) / (f.p * f.p);
            },
            [&](const DiscreteUniform& f) -> std::optional<double> {
                return (double(f.n) * double(f.n) - 1.0) / 12.0;
            },
            [&](const Zipf& f) -> std::optional<double> {
                double m1 = sf::harmonic(f.alpha - 1.0, f.n) / f.norm;
                double m2 = sf::harmonic(f.alpha - 2.0, f.n) / f.norm;
                return m2 - m1 * m1;
            },
            [&](const Zeta& f) -> std::optional<double> {
                if (f.alpha <= 3.0) return std::nullopt;
                double m1 = sf::zeta(f.alpha - 1.0) / f.norm;
                double m2 = sf::zeta(f.alpha - 2.0) / f.norm;
                return m2 - m1 * m1;
            },
            [&](const Poisson& f) -> std::optional<double> { return f.lambda; },
            [&](const Binomial& f) -> std::optional<double> {
                return double(f.n) * f.p * (1.0 - f.p);
            },
            [&](const auto&) -> std::optional<double> {
                // numeric fallback: cmp / pmf / grid / truncated
                if (is_discrete()) {
                    std::vector<std::pair<double, double>> atoms;
                    enumerate_atoms(1e-14, 4u << 20, atoms);
                    double m1 = 0.0, m2 = 0.0;
                    for (const auto& [x, m] : atoms) {
                        m1 += x * m;
                        m2 += x * x * m;
                    }
                    return m2 - m1 * m1;
                }
                if (const auto* g = get_if<GridDensity>()) {
                    double m1 = 0.0, m2 = 0.0;
                    for (std::size_t i = 0; i + 1 < g->points.size(); ++i) {
                        double h = g->points[i + 1] - g->points[i];
                        m1 += 0.5 * h * (g->points[i] * g->values[i] +
                                         g->points[i + 1] * g->values[i + 1]);
                        m2 += 0.5 * h * (g->points[i] * g->points[i] * g->values[i] +
                                         g->points[i + 1] * g->points[i + 1] * g->values[i + 1]);
                    }
                    return m2 - m1 * m1;
                }
                const auto* t = get_if<Truncated>();
                double m1, m2;
                trunc_moments_ac(*t, m1, m2);
                return m2 - m1 * m1;
            }},
        v_);
}

// --- atom enumeration ------------------------------------------------------------

double DistributionSpec::enumerate_atoms(double tail_cut, std::size_t cap,
                                         std::vector<std::pair<double, double>>& out) const {
    if (!is_discrete()) throw ArgumentError("enumerate_atoms: continuous distribution");
    if (const auto* f = get_if<PmfTable>()) {
        for (const auto& a : f->atoms) out.push_back(a);
        return 0.0;
    }
    if (const auto* f = get_if<Truncated>()) {
        std::vector<std::pair<double, double>> inner_atoms;
        double tail = f->inner->enumerate_atoms(tail_cut * f->window_prob, cap, inner_atoms);
        for (const auto& [x, m] : inner_atoms)
            if (x > f->lo && x < f->hi) out.emplace_back(x, m / f->window_prob);
        return tail / f->window_prob;
    }
    SupportDescriptor sup = support();
    long long k = sup.lattice_lo;
    long long hi = sup.lattice_hi;
    std::size_t emitted = 0;
    while (k <= hi) {
        double m = eval(double(k));
        if (m > 0.0) {
            out.emplace_back(double(k), m);
            ++emitted;
        }
        if (hi == lattice_unbounded) {
            double tail = tail_above(double(k));
            if (tail <= tail_cut) return tail;
            if (emitted >= cap) return tail;
        } else if (emitted >= cap && k < hi) {
            return tail_above(double(k));
        }
        ++k;
    }
    return 0.0;
}

}  // namespace conflate
