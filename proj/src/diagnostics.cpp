#include "conflate/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "conflate/errors.hpp"
#include "conflate/parallel.hpp"
#include "conflate/special_functions.hpp"

namespace conflate {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double log_underflow = -690.0;  // product below ~1e-300 counts as zero

double log2_of(double x) { return std::log2(x); }

}  // namespace

EventSet EventSet::of_atoms(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    EventSet e;
    e.kind = Kind::atom_union;
    e.atoms = std::move(xs);
    return e;
}

EventSet EventSet::of_intervals(std::vector<std::pair<double, double>> iv) {
    std::sort(iv.begin(), iv.end());
    for (std::size_t i = 0; i < iv.size(); ++i) {
        if (!(iv[i].first < iv[i].second))
            throw ArgumentError("EventSet: intervals must be nonempty (a < b)");
        if (i > 0 && iv[i].first < iv[i - 1].second)
            throw ArgumentError("EventSet: intervals must be disjoint");
    }
    EventSet e;
    e.kind = Kind::interval_union;
    e.intervals = std::move(iv);
    return e;
}

double event_prob(const DistributionSpec& spec, const EventSet& ev) {
    if (ev.kind == EventSet::Kind::atom_union) {
        double s = 0.0;
        for (double x : ev.atoms) s += spec.atom_mass(x);
        return s;
    }
    double s = 0.0;
    for (const auto& [a, b] : ev.intervals) s += spec.interval_prob(a, b);
    return std::min(s, 1.0);
}

double joint_information(const std::vector<DistributionSpec>& specs, const EventSet& ev) {
    if (specs.empty()) throw ArgumentError("joint_information: no inputs");
    double bits = 0.0;
    for (const auto& s : specs) {
        double p = event_prob(s, ev);
        if (p <= 0.0) return inf;
        bits -= log2_of(p);
    }
    return bits;
}

double information_loss(const DistributionSpec& q, const std::vector<DistributionSpec>& specs,
                        const EventSet& ev) {
    double prod = 1.0;
    for (const auto& s : specs) prod *= event_prob(s, ev);
    double qv = event_prob(q, ev);
    if (prod > 0.0) {
        if (qv <= 0.0) return -inf;
        return log2_of(qv / prod);
    }
    return qv <= 0.0 ? 0.0 : inf;
}

// --- maximal information loss -------------------------------------------------------

namespace {

InformationReport max_loss_discrete(const DistributionSpec& q,
                                    const std::vector<DistributionSpec>& specs) {
    if (!q.is_discrete())
        throw ArgumentError("max_information_loss: discrete inputs need a discrete candidate");
    std::vector<std::pair<double, double>> products;
    common_atom_products(specs, products);
    if (products.empty())
        throw IncompatibilityError("max_information_loss: no common atoms");
    if (products.size() > 20)
        throw ArgumentError(
            "max_information_loss: more than 20 common atoms; exhaustive subset search "
            "is limited to 20 (sampling-based search is out of scope)");

    double norm = 0.0;
    for (const auto& [x, p] : products) norm += p;

    InformationReport rep;
    rep.bound = log2_of(1.0 / norm);
    rep.search_level = 0;

    // any candidate atom outside the common set forces an infinite loss
    std::vector<std::pair<double, double>> q_atoms;
    q.enumerate_atoms(1e-15, 1u << 20, q_atoms);
    for (const auto& [x, m] : q_atoms) {
        bool common = std::any_of(products.begin(), products.end(),
                                  [&](const auto& a) { return a.first == x; });
        if (!common && m > 0.0) {
            rep.max_loss = inf;
            rep.witness = EventSet::of_atoms({x});
            rep.attains_bound = false;
            return rep;
        }
    }

    const std::size_t n = products.size();
    std::vector<double> qmass(n);
    std::vector<std::vector<double>> pmass(specs.size(), std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        qmass[i] = q.atom_mass(products[i].first);
        for (std::size_t s = 0; s < specs.size(); ++s)
            pmass[s][i] = specs[s].atom_mass(products[i].first);
    }

    double best = -inf;
    std::uint32_t best_mask = 0;
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        double qs = 0.0;
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            qs += qmass[std::size_t(__builtin_ctz(m))];
        if (qs <= 0.0) continue;
        double lp = 0.0;
        for (std::size_t s = 0; s < specs.size(); ++s) {
            double ps = 0.0;
            for (std::uint32_t m = mask; m != 0; m &= m - 1)
                ps += pmass[s][std::size_t(__builtin_ctz(m))];
            lp += std::log2(ps);
        }
        double loss = std::log2(qs) - lp;
        if (loss > best + 1e-15) {
            best = loss;
            best_mask = mask;
        }
    }
    rep.max_loss = best;
    std::vector<double> witness;
    for (std::uint32_t m = best_mask; m != 0; m &= m - 1)
        witness.push_back(products[std::size_t(__builtin_ctz(m))].first);
    rep.witness = EventSet::of_atoms(std::move(witness));
    rep.attains_bound = std::fabs(rep.max_loss - rep.bound) <= 1e-9;
    return rep;
}

InformationReport max_loss_ac(const DistributionSpec& q,
                              const std::vector<DistributionSpec>& specs, int level) {
    // Discretize candidate and inputs to dyadic cells; the maximal loss over
    // cell unions is attained at a single cell (ratio of sums <= max ratio).
    double lo = inf, hi = -inf;
    for (const auto& s : specs) {
        lo = std::min(lo, s.quantile(1e-9));
        hi = std::max(hi, s.quantile(1.0 - 1e-9));
    }
    lo = std::floor(lo) - 1.0;
    hi = std::ceil(hi) + 1.0;
    const double cell = std::ldexp(1.0, -level);
    const long long k_min = (long long)(lo / cell);
    const long long k_max = (long long)(hi / cell);
    if (k_max - k_min > (1ll << 22))
        throw ArgumentError("max_information_loss: dyadic window too large at this level");

    InformationReport rep;
    rep.search_level = level;
    double norm = 0.0;
    double best = -inf;
    long long best_k = k_min;
    bool unbounded = false;
    long long unbounded_k = 0;
    for (long long k = k_min; k < k_max; ++k) {
        double a = double(k) * cell, b = double(k + 1) * cell;
        double prod = 1.0;
        for (const auto& s : specs) {
            prod *= s.interval_co(a, b);
            if (prod <= 0.0) break;
        }
        double qv = q.interval_co(a, b);
        if (prod > 0.0) {
            norm += prod;
            if (qv > 0.0) {
                double loss = std::log2(qv / prod);
                if (loss > best) {
                    best = loss;
                    best_k = k;
                }
            }
        } else if (qv > 1e-13 && !unbounded) {
            unbounded = true;
            unbounded_k = k;
        }
    }
    if (!(norm > 0.0))
        throw IncompatibilityError("max_information_loss: zero dyadic product mass");
    rep.bound = log2_of(1.0 / norm);
    if (unbounded) {
        rep.max_loss = inf;
        rep.witness = EventSet::of_intervals(
            {{double(unbounded_k) * cell, double(unbounded_k + 1) * cell}});
        rep.attains_bound = false;
        return rep;
    }
    rep.max_loss = best;
    rep.witness =
        EventSet::of_intervals({{double(best_k) * cell, double(best_k + 1) * cell}});
    rep.attains_bound = std::fabs(rep.max_loss - rep.bound) <= 1e-9;
    return rep;
}

}  // namespace

InformationReport max_information_loss(const DistributionSpec& q,
                                       const std::vector<DistributionSpec>& specs,
                                       int ac_level) {
    if (specs.empty()) throw ArgumentError("max_information_loss: no inputs");
    bool all_discrete = true;
    for (const auto& s : specs) all_discrete = all_discrete && s.is_discrete();
    if (all_discrete) return max_loss_discrete(q, specs);
    return max_loss_ac(q, specs, ac_level);
}

// --- minimax likelihood ratio --------------------------------------------------------

namespace {

// Evaluation points for the continuous ratio q/Πp: quantile ladders of every
// distribution, a uniform ladder, and geometric ladders pushed deep into any
// finite support edge (the ratio of power-law tails moves slowest there).
std::vector<double> ratio_points(const DistributionSpec& q,
                                 const std::vector<DistributionSpec>& specs, double lo,
                                 double hi) {
    if (const auto* g = q.get_if<GridDensity>()) {
        std::vector<double> pts;
        for (double x : g->points)
            if (x > lo && x < hi) pts.push_back(x);
        if (!pts.empty()) return pts;
    }
    std::vector<double> pts;
    const int m = 2048;
    auto ladder = [&](const DistributionSpec& s) {
        for (int i = 0; i < m; ++i) {
            double u = 1e-9 + (1.0 - 2e-9) * double(i) / double(m - 1);
            double x = s.quantile(u);
            if (x > lo && x < hi) pts.push_back(x);
        }
    };
    ladder(q);
    for (const auto& s : specs) ladder(s);
    for (int i = 0; i <= m; ++i) pts.push_back(lo + (hi - lo) * double(i) / double(m));
    if (std::isfinite(lo))
        for (int r = 1; r <= 280; ++r) {
            double x = lo + (hi - lo) * std::pow(10.0, -r);
            if (x > lo && x < hi) pts.push_back(x);
        }
    if (std::isfinite(hi))
        for (int r = 1; r <= 280; ++r) {
            double x = hi - (hi - lo) * std::pow(10.0, -r);
            if (x > lo && x < hi) pts.push_back(x);
        }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

MlrReport mlr_delta(const DistributionSpec& q, const std::vector<DistributionSpec>& specs) {
    if (specs.empty()) throw ArgumentError("mlr_delta: no inputs");
    bool all_discrete = true, any_discrete = false;
    for (const auto& s : specs) {
        all_discrete = all_discrete && s.is_discrete();
        any_discrete = any_discrete || s.is_discrete();
    }
    if (any_discrete && !all_discrete)
        throw ArgumentError("mlr_delta: mixed discrete/continuous inputs are not comparable");
    if (q.is_discrete() != all_discrete)
        throw ArgumentError("mlr_delta: candidate and inputs must both be discrete or both a.c.");

    MlrReport rep;
    if (all_discrete) {
        std::vector<std::pair<double, double>> products;
        common_atom_products(specs, products);
        std::vector<std::pair<double, double>> q_atoms;
        q.enumerate_atoms(1e-15, 1u << 20, q_atoms);
        std::set<double> xs;
        for (const auto& [x, p] : products) xs.insert(x);
        for (const auto& [x, m] : q_atoms) xs.insert(x);
        // any point off every atom set has ratio 0/0 := 1
        double rmax = 1.0, rmin = 1.0;
        double amax = nan, amin = nan;
        for (double x : xs) {
            double prod = 1.0;
            for (const auto& s : specs) prod *= s.atom_mass(x);
            double qm = q.atom_mass(x);
            double r;
            if (prod > 0.0) r = qm / prod;
            else if (qm > 0.0) r = inf;
            else continue;
            if (r > rmax) { rmax = r; amax = x; }
            if (r < rmin) { rmin = r; amin = x; }
        }
        rep.delta = rmax - rmin;
        rep.argmax_point = amax;
        rep.argmin_point = amin;
        return rep;
    }

    double lo = -inf, hi = inf;  // positive-product region
    for (const auto& s : specs) {
        auto h = s.support().hull();
        lo = std::max(lo, h.first);
        hi = std::min(hi, h.second);
    }
    if (!(lo < hi)) throw IncompatibilityError("mlr_delta: input supports do not overlap");

    auto qh = q.support().hull();
    double q_outside = 0.0;
    if (qh.first < lo) q_outside += q.cdf(lo);
    if (qh.second > hi) q_outside += q.tail_above(hi);
    if (q_outside > 1e-13) {
        rep.delta = inf;
        rep.argmax_point = qh.first < lo ? (std::isfinite(qh.first) ? 0.5 * (qh.first + lo)
                                                                    : lo - 1.0)
                                         : (std::isfinite(qh.second) ? 0.5 * (hi + qh.second)
                                                                     : hi + 1.0);
        rep.argmin_point = nan;
        return rep;
    }

    auto pts = ratio_points(q, specs, lo, hi);
    double rmax = -inf, rmin = inf;
    double amax = nan, amin = nan;
    for (double x : pts) {
        double lp = 0.0;
        for (const auto& s : specs) lp += s.log_eval(x);
        if (!(lp > log_underflow)) continue;  // essential sup/inf threshold
        double r = std::exp(q.log_eval(x) - lp);
        if (r > rmax) { rmax = r; amax = x; }
        if (r < rmin) { rmin = r; amin = x; }
    }
    // a region where the product and candidate both vanish contributes the
    // conventional ratio 1 (everything outside the product support hull)
    if (std::isfinite(lo) || std::isfinite(hi)) {
        if (1.0 > rmax) { rmax = 1.0; amax = nan; }
        if (1.0 < rmin) { rmin = 1.0; amin = nan; }
    }
    rep.delta = rmax - rmin;
    rep.argmax_point = amax;
    rep.argmin_point = amin;
    return rep;
}

// --- proportional consolidation --------------------------------------------------------

ProportionalityReport proportionality_check(const DistributionSpec& q,
                                            const std::vector<DistributionSpec>& specs,
                                            double tol) {
    if (specs.empty()) throw ArgumentError("proportionality_check: no inputs");
    bool all_discrete = true;
    for (const auto& s : specs) all_discrete = all_discrete && s.is_discrete();

    ProportionalityReport rep;
    rep.ok = true;

    if (all_discrete) {
        if (!q.is_discrete())
            throw ArgumentError("proportionality_check: discrete inputs need a discrete candidate");
        std::vector<std::pair<double, double>> products;
        common_atom_products(specs, products);
        if (products.empty())
            throw IncompatibilityError("proportionality_check: no common atoms");
        auto anchor = std::max_element(products.begin(), products.end(),
                                       [](const auto& a, const auto& b) {
                                           return a.second < b.second;
                                       });
        double ax = anchor->first, ap = anchor->second;
        double aq = q.atom_mass(ax);
        std::vector<std::pair<double, double>> q_atoms;
        q.enumerate_atoms(1e-15, 1u << 20, q_atoms);
        // candidate mass where the product vanishes breaks every cross ratio
        for (const auto& [x, m] : q_atoms) {
            double prod = 1.0;
            for (const auto& s : specs) prod *= s.atom_mass(x);
            if (prod <= 0.0 && m > 0.0) {
                rep.ok = false;
                rep.worst_x = x;
                rep.worst_y = ax;
                rep.worst_deviation = inf;
                return rep;
            }
        }
        if (aq <= 0.0) {
            rep.ok = false;
            rep.worst_x = ax;
            rep.worst_y = ax;
            rep.worst_deviation = inf;
            return rep;
        }
        for (const auto& [x, p] : products) {
            double qm = q.atom_mass(x);
            double dev = qm <= 0.0 ? inf
                                   : std::fabs((std::log(qm) - std::log(aq)) -
                                               (std::log(p) - std::log(ap)));
            if (dev > rep.worst_deviation) {
                rep.worst_deviation = dev;
                rep.worst_x = x;
                rep.worst_y = ax;
            }
        }
        rep.ok = rep.worst_deviation <= tol;
        return rep;
    }

    if (q.is_discrete())
        throw ArgumentError("proportionality_check: a.c. inputs need an a.c. candidate");
    double lo = -inf, hi = inf;
    for (const auto& s : specs) {
        auto h = s.support().hull();
        lo = std::max(lo, h.first);
        hi = std::min(hi, h.second);
    }
    if (!(lo < hi))
        throw IncompatibilityError("proportionality_check: input supports do not overlap");
    auto pts = ratio_points(q, specs, lo, hi);
    double anchor_lp = -inf, anchor_x = nan, anchor_lq = 0.0;
    std::vector<double> lps(pts.size()), lqs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double lp = 0.0;
        for (const auto& s : specs) lp += s.log_eval(pts[i]);
        lps[i] = lp;
        lqs[i] = q.log_eval(pts[i]);
        if (lp > anchor_lp) {
            anchor_lp = lp;
            anchor_lq = lqs[i];
            anchor_x = pts[i];
        }
    }
    if (!(anchor_lp > log_underflow))
        throw IncompatibilityError("proportionality_check: density product vanishes everywhere");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(lps[i] > log_underflow)) continue;
        double dev = std::isfinite(lqs[i])
                         ? std::fabs((lqs[i] - anchor_lq) - (lps[i] - anchor_lp))
                         : inf;
        if (dev > rep.worst_deviation) {
            rep.worst_deviation = dev;
            rep.worst_x = pts[i];
            rep.worst_y = anchor_x;
        }
    }
    rep.ok = rep.worst_deviation <= tol;
    return rep;
}

// --- characteristic functions -----------------------------------------------------------

std::complex<double> char_fn_at(const DistributionSpec& spec, double t) {
    using namespace std::complex_literals;
    if (const auto* f = spec.get_if<Normal>())
        return std::exp(std::complex<double>(-0.5 * f->sigma2 * t * t, f->mu * t));
    if (const auto* f = spec.get_if<Exponential>())
        return 1.0 / std::complex<double>(1.0, -f->mean * t);
    if (const auto* f = spec.get_if<Uniform>()) {
        if (t == 0.0) return 1.0;
        std::complex<double> num =
            std::exp(1i * (t * f->b)) - std::exp(1i * (t * f->a));
        return num / (1i * (t * (f->b - f->a)));
    }
    if (const auto* f = spec.get_if<Laplace>())
        return 1.0 / std::complex<double>(1.0 + f->scale * f->scale * t * t, 0.0);
    if (const auto* f = spec.get_if<Cauchy>())
        return std::exp(std::complex<double>(-f->scale * std::fabs(t), f->loc * t));
    if (const auto* f = spec.get_if<Gamma>())
        return std::pow(std::complex<double>(1.0, -f->beta * t), -f->alpha);
    if (spec.is_discrete()) {
        std::vector<std::pair<double, double>> atoms;
        spec.enumerate_atoms(1e-12, 1u << 20, atoms);
        std::complex<double> s = 0.0;
        for (const auto& [x, m] : atoms) s += m * std::exp(1i * (t * x));
        return s;
    }
    // generic a.c.: quadrature on a quantile ladder
    const int n = 16384;
    std::complex<double> s = 0.0;
    double prev_x = spec.quantile(1e-10);
    double prev_f = spec.eval(prev_x);
    std::complex<double> prev_e = std::exp(1i * (t * prev_x));
    for (int i = 1; i < n; ++i) {
        double u = 1e-10 + (1.0 - 2e-10) * double(i) / double(n - 1);
        double x = spec.quantile(u);
        double f = spec.eval(x);
        std::complex<double> e = std::exp(1i * (t * x));
        s += 0.5 * (x - prev_x) * (prev_f * prev_e + f * e);
        prev_x = x;
        prev_f = f;
        prev_e = e;
    }
    return s;
}

CharacteristicGrid characteristic_fn(const DistributionSpec& spec, double t_max, int n_points) {
    if (!(t_max > 0.0)) throw ArgumentError("characteristic_fn: t_max must be positive");
    if (n_points < 3) throw ArgumentError("characteristic_fn: need at least 3 grid points");
    if (n_points % 2 == 0) ++n_points;  // keep t = 0 on the grid
    CharacteristicGrid g;
    g.t.resize(n_points);
    g.values.resize(n_points);
    const int half = n_points / 2;
    const double h = t_max / half;
    for (int i = 0; i < n_points; ++i) g.t[i] = double(i - half) * h;
    parallel_for(std::size_t(n_points), [&](std::size_t i) {
        g.values[i] = char_fn_at(spec, g.t[i]);
    });
    return g;
}

// --- convolution theorem ------------------------------------------------------------------

namespace {

bool integrable_cf(const DistributionSpec& s) {
    if (s.get_if<Normal>() || s.get_if<Laplace>() || s.get_if<Cauchy>()) return true;
    if (const auto* g = s.get_if<Gamma>()) return g->alpha > 1.0;
    return false;
}

// |psi| envelope used to size the truncation of the convolution integral.
double cf_abs(const DistributionSpec& s, double t) { return std::abs(char_fn_at(s, t)); }

}  // namespace

double convolution_check(const DistributionSpec& a, const DistributionSpec& b, double t_max,
                         int n_points) {
    if (a.is_discrete() || b.is_discrete())
        throw ArgumentError(
            "convolution_check: characteristic functions of purely atomic distributions are "
            "not integrable and their convolution need not exist");
    if (!integrable_cf(a) || !integrable_cf(b))
        throw ArgumentError(
            "convolution_check: requires inputs with integrable closed-form characteristic "
            "functions (normal, laplace, cauchy, gamma with alpha > 1)");
    if (n_points % 2 == 0) ++n_points;
    const int half = n_points / 2;
    const double h = t_max / half;

    // truncate where both characteristic functions are negligible
    double s_max = t_max + 10.0;
    while ((cf_abs(a, s_max) > 1e-14 || cf_abs(b, s_max) > 1e-14) &&
           2.0 * s_max / h < double(1 << 22))
        s_max *= 1.5;
    const long long m = (long long)std::ceil(s_max / h);
    const long long ext = m + half;  // psi_a needed out to (t - s)

    std::vector<std::complex<double>> psi_a(2 * ext + 1), psi_b(2 * m + 1);
    parallel_for(psi_a.size(), [&](std::size_t i) {
        psi_a[i] = char_fn_at(a, double((long long)i - ext) * h);
    });
    parallel_for(psi_b.size(), [&](std::size_t i) {
        psi_b[i] = char_fn_at(b, double((long long)i - m) * h);
    });

    auto conf = conflate({a, b});
    const double c = conf.norm_constant;
    if (!(c > 0.0) || !std::isfinite(c))
        throw IncompatibilityError("convolution_check: density product is not integrable");
    auto target = conf.as_spec();

    std::vector<double> dev(static_cast<std::size_t>(n_points));
    parallel_for(std::size_t(n_points), [&](std::size_t j) {
        const long long tj = (long long)j - half;
        std::complex<double> acc = 0.0;
        for (long long k = -m; k <= m; ++k) {
            double w = (k == -m || k == m) ? 0.5 : 1.0;
            acc += w * psi_a[std::size_t(tj - k + ext)] * psi_b[std::size_t(k + m)];
        }
        std::complex<double> conv = acc * h / (2.0 * sf::pi * c);
        dev[j] = std::abs(conv - char_fn_at(target, double(tj) * h));
    });
    double worst = 0.0;
    for (double d : dev) worst = std::max(worst, d);
    return worst;
}

}  // namespace conflate
