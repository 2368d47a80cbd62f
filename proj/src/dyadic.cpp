#include "conflate/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "conflate/errors.hpp"
#include "conflate/parallel.hpp"

namespace conflate {

namespace {

long long floor_div2(long long k) {
    return k >= 0 ? k / 2 : (k - 1) / 2;
}

std::vector<DistributionSpec> sorted_specs(std::vector<DistributionSpec> specs) {
    std::sort(specs.begin(), specs.end(),
              [](const DistributionSpec& a, const DistributionSpec& b) {
                  return a.canonical_json() < b.canonical_json();
              });
    return specs;
}

// Per-spec mass of each level-j cell intersected with the spec's atoms.
std::vector<std::pair<long long, double>> discrete_cells(const DistributionSpec& spec, int level,
                                                         double wlo, double whi,
                                                         double* outside) {
    std::vector<std::pair<double, double>> atoms;
    double tail = spec.enumerate_atoms(1e-15, 4u << 20, atoms);
    const double scale = std::ldexp(1.0, level);
    std::map<long long, double> cells;
    double out = tail;
    for (const auto& [x, m] : atoms) {
        if (x < wlo || x >= whi) {
            out += m;
            continue;
        }
        cells[(long long)std::floor(x * scale)] += m;
    }
    if (outside) *outside = out;
    return {cells.begin(), cells.end()};
}

}  // namespace

double DiscretePMF::mass_at(double x) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), std::make_pair(x, -1.0));
    return it != atoms.end() && it->first == x ? it->second : 0.0;
}

double DiscretePMF::total() const {
    double s = 0.0;
    for (const auto& [x, m] : atoms) s += m;
    return s;
}

double tv_distance(const DiscretePMF& a, const DiscretePMF& b) {
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.atoms.size() || j < b.atoms.size()) {
        if (j >= b.atoms.size() || (i < a.atoms.size() && a.atoms[i].first < b.atoms[j].first)) {
            d += a.atoms[i++].second;
        } else if (i >= a.atoms.size() || b.atoms[j].first < a.atoms[i].first) {
            d += b.atoms[j++].second;
        } else {
            d += std::fabs(a.atoms[i++].second - b.atoms[j++].second);
        }
    }
    return 0.5 * d;
}

std::pair<double, double> default_window(const std::vector<DistributionSpec>& specs,
                                         int level_for_budget, long long cell_budget) {
    if (specs.empty()) throw ArgumentError("default_window: no inputs");
    bool all_discrete = true;
    for (const auto& s : specs) all_discrete = all_discrete && s.is_discrete();
    for (double eps : {1e-9, 1e-7, 1e-5, 1e-3}) {
        double lo = inf, hi = -inf;
        for (const auto& s : specs) {
            lo = std::min(lo, s.quantile(eps));
            hi = std::max(hi, s.quantile(1.0 - eps));
        }
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw ArgumentError("default_window: unbounded quantile range");
        double wlo = std::floor(lo) - 1.0;
        double whi = std::ceil(hi) + 1.0;
        // all-discrete inputs enumerate atoms rather than cells, so only the
        // window width counts against the budget
        double cells = all_discrete ? (whi - wlo)
                                    : (whi - wlo) * std::ldexp(1.0, level_for_budget);
        if (cells <= double(cell_budget)) return {wlo, whi};
    }
    throw ArgumentError("default_window: window exceeds the cell budget even at 1e-3 tails");
}

DyadicMeasure mu_j(const std::vector<DistributionSpec>& specs_in, int level,
                   std::pair<double, double> window) {
    if (specs_in.empty()) throw ArgumentError("mu_j: no inputs");
    if (level < 1 || level > dyadic_level_cap)
        throw ArgumentError("mu_j: level outside [1, 30]");
    if (!(window.first < window.second) || !std::isfinite(window.first) ||
        !std::isfinite(window.second))
        throw ArgumentError("mu_j: window must be a finite interval");
    const auto specs = sorted_specs(specs_in);

    DyadicMeasure mu;
    mu.level = level;
    mu.window_lo = (long long)window.first;
    mu.window_hi = (long long)window.second;
    const double wlo = window.first, whi = window.second;
    const double scale = std::ldexp(1.0, level);
    const double cell = std::ldexp(1.0, -level);

    // The product mass outside the window is at most the smallest
    // single-input mass outside it (products of sub-unit factors shrink).
    double min_outside = 1.0;

    std::vector<std::size_t> discrete_idx, ac_idx;
    for (std::size_t i = 0; i < specs.size(); ++i)
        (specs[i].is_discrete() ? discrete_idx : ac_idx).push_back(i);

    if (!discrete_idx.empty()) {
        // Candidate cells come from the discrete inputs' atoms.
        std::vector<std::vector<std::pair<long long, double>>> maps;
        for (std::size_t i : discrete_idx) {
            double outside = 0.0;
            maps.push_back(discrete_cells(specs[i], level, wlo, whi, &outside));
            min_outside = std::min(min_outside, outside);
        }
        for (std::size_t i : ac_idx)
            min_outside = std::min(min_outside, 1.0 - specs[i].interval_co(wlo, whi));
        // Intersect on the first (they are few and sorted).
        for (const auto& [k, m0] : maps[0]) {
            double prod = m0;
            for (std::size_t mi = 1; mi < maps.size() && prod > 0.0; ++mi) {
                const auto& mp = maps[mi];
                auto it = std::lower_bound(mp.begin(), mp.end(), std::make_pair(k, -1.0));
                prod = (it != mp.end() && it->first == k) ? prod * it->second : 0.0;
            }
            if (prod <= 0.0) continue;
            double a = double(k) * cell, b = double(k + 1) * cell;
            for (std::size_t i : ac_idx) {
                prod *= specs[i].interval_co(a, b);
                if (prod <= 0.0) break;
            }
            if (prod > 0.0) mu.masses.emplace_back(k, prod);
        }
    } else {
        const long long k_min = (long long)std::floor(wlo * scale);
        const long long k_max = (long long)std::ceil(whi * scale) - 1;
        if (k_max - k_min + 1 > (1ll << 23))
            throw ArgumentError("mu_j: window/level cell count exceeds the budget");
        const std::size_t ncells = std::size_t(k_max - k_min + 1);
        // cdf at every cell boundary, one pass per input
        std::vector<std::vector<double>> cdfs(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            auto& F = cdfs[i];
            F.resize(ncells + 1);
            parallel_for(ncells + 1, [&](std::size_t t) {
                F[t] = specs[i].cdf(double(k_min + (long long)t) * cell);
            });
            min_outside = std::min(min_outside, 1.0 - specs[i].interval_co(wlo, whi));
        }
        std::vector<double> prod(ncells);
        parallel_for(ncells, [&](std::size_t t) {
            double p = 1.0;
            for (std::size_t i = 0; i < specs.size() && p > 0.0; ++i)
                p *= std::max(0.0, cdfs[i][t + 1] - cdfs[i][t]);
            prod[t] = p;
        });
        for (std::size_t t = 0; t < ncells; ++t)
            if (prod[t] > 0.0) mu.masses.emplace_back(k_min + (long long)t, prod[t]);
    }

    mu.tail_bound = min_outside;
    double total = 0.0;
    for (const auto& [k, m] : mu.masses) total += m;
    mu.total_mass = total;
    return mu;
}

DiscretePMF normalized(const DyadicMeasure& mu) {
    if (!(mu.total_mass > 0.0))
        throw IncompatibilityError("normalized: dyadic measure has zero total mass at level " +
                                   std::to_string(mu.level));
    DiscretePMF pmf;
    pmf.atoms.reserve(mu.masses.size());
    const double cell = std::ldexp(1.0, -mu.level);
    for (const auto& [k, m] : mu.masses)
        pmf.atoms.emplace_back(double(k) * cell, m / mu.total_mass);
    pmf.tail_bound = mu.tail_bound / mu.total_mass;
    return pmf;
}

namespace {

// Aggregates a level-j measure onto level j-1 cells.
std::vector<std::pair<long long, double>> coarsen(
    const std::vector<std::pair<long long, double>>& fine) {
    std::vector<std::pair<long long, double>> out;
    for (const auto& [k, m] : fine) {
        long long kc = floor_div2(k);
        if (!out.empty() && out.back().first == kc)
            out.back().second += m;
        else
            out.emplace_back(kc, m);
    }
    return out;
}

double median_point(const DiscretePMF& pmf) {
    double cum = 0.0;
    for (const auto& [x, m] : pmf.atoms) {
        cum += m;
        if (cum >= 0.5) return x;
    }
    return pmf.atoms.empty() ? 0.0 : pmf.atoms.back().first;
}

}  // namespace

OracleReport oracle_conflation(const std::vector<DistributionSpec>& specs, int j_max,
                               double tv_tol) {
    if (specs.empty()) throw ArgumentError("oracle_conflation: no inputs");
    if (j_max < 1 || j_max > dyadic_level_cap)
        throw ArgumentError("oracle_conflation: j_max outside [1, 30]");

    OracleReport rep;
    rep.window = default_window(specs, j_max);

    DyadicMeasure prev;
    DiscretePMF prev_norm;
    std::vector<double> medians;
    for (int j = 1; j <= j_max; ++j) {
        DyadicMeasure cur = mu_j(specs, j, rep.window);
        if (!(cur.total_mass > 0.0))
            throw IncompatibilityError(
                "oracle_conflation: zero dyadic mass at level " + std::to_string(j) +
                " (incompatible inputs)");
        rep.mass_sequence.push_back(cur.total_mass);
        DiscretePMF cur_norm = normalized(cur);
        rep.achieved_level = j;

        if (j > 1) {
            // refinement inequality, cell by cell on the coarser grid
            auto agg = coarsen(cur.masses);
            for (const auto& [k, m] : agg) {
                auto it = std::lower_bound(prev.masses.begin(), prev.masses.end(),
                                           std::make_pair(k, -1.0));
                double coarse = (it != prev.masses.end() && it->first == k) ? it->second : 0.0;
                if (m > coarse + 1e-12) rep.monotonicity_ok = false;
            }
            // successive normalized measures compared on the coarser grid
            DiscretePMF cur_on_prev;
            double tot = cur.total_mass;
            for (const auto& [k, m] : agg)
                cur_on_prev.atoms.emplace_back(std::ldexp(double(k), -(j - 1)), m / tot);
            double tv = tv_distance(cur_on_prev, prev_norm);
            medians.push_back(median_point(cur_norm));
            if (medians.size() >= 5) {
                std::size_t m0 = medians.size() - 5;
                bool monotone = true;
                for (std::size_t t = m0; t + 1 < medians.size(); ++t) {
                    double step = medians[t + 1] - medians[t];
                    if (!(step > 0.0) && !(step < 0.0)) monotone = false;
                    if (t > m0 && (medians[t + 1] - medians[t]) *
                                          (medians[t] - medians[t - 1]) <= 0.0)
                        monotone = false;
                }
                if (monotone && std::fabs(medians.back() - medians[m0]) > 1.0) {
                    rep.escape_flag = true;
                    rep.approx = cur_norm;
                    rep.tail_bound = cur.tail_bound;
                    return rep;
                }
            }
            if (tv < tv_tol) {
                rep.approx = cur_norm;
                rep.tail_bound = cur.tail_bound;
                return rep;
            }
        } else {
            medians.push_back(median_point(cur_norm));
        }
        prev = std::move(cur);
        prev_norm = std::move(cur_norm);
    }
    rep.approx = prev_norm;
    rep.tail_bound = prev.tail_bound;
    return rep;
}

}  // namespace conflate
