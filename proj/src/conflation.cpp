#include "conflate/conflation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conflate/errors.hpp"
#include "conflate/fusion.hpp"
#include "conflate/parallel.hpp"
#include "conflate/special_functions.hpp"

namespace conflate {

namespace {

std::vector<DistributionSpec> sorted_specs(std::vector<DistributionSpec> specs) {
    std::sort(specs.begin(), specs.end(),
              [](const DistributionSpec& a, const DistributionSpec& b) {
                  return a.canonical_json() < b.canonical_json();
              });
    return specs;
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

// Tail bound: a product of sums dominates the sum of products, so the
// un-enumerated product mass is at most the smallest single-input tail.
double common_atom_products(const std::vector<DistributionSpec>& specs,
                            std::vector<std::pair<double, double>>& out, double tail_cut,
                            std::size_t cap) {
    std::vector<SupportDescriptor> sup;
    sup.reserve(specs.size());
    for (const auto& s : specs) sup.push_back(s.support());

    // A finite atom list pins the candidates down exactly.
    const SupportDescriptor* finite = nullptr;
    for (const auto& d : sup)
        if (d.kind == SupportDescriptor::Kind::finite_atoms &&
            (!finite || d.atoms.size() < finite->atoms.size()))
            finite = &d;
    if (finite) {
        for (double x : finite->atoms) {
            double prod = 1.0;
            for (const auto& s : specs) {
                prod *= s.atom_mass(x);
                if (prod <= 0.0) break;
            }
            if (prod > 0.0) out.emplace_back(x, prod);
        }
        return 0.0;
    }

    long long lo = 0, hi = lattice_unbounded;
    for (const auto& d : sup) {
        lo = std::max(lo, d.lattice_lo);
        hi = std::min(hi, d.lattice_hi);
    }
    if (lo > hi) return 0.0;
    std::size_t emitted = 0;
    for (long long k = lo;; ++k) {
        if (hi != lattice_unbounded && k > hi) return 0.0;
        double x = double(k);
        double prod = 1.0;
        for (const auto& s : specs) {
            prod *= s.atom_mass(x);
            if (prod <= 0.0) break;
        }
        if (prod > 0.0) {
            out.emplace_back(x, prod);
            ++emitted;
        }
        if (hi == lattice_unbounded || emitted >= cap) {
            double tail = 1.0;
            for (const auto& s : specs) tail = std::min(tail, s.tail_above(x));
            if (tail <= tail_cut || emitted >= cap) return tail;
        }
    }
}

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::closed_form: return "closed_form";
        case Engine::discrete_product: return "discrete_product";
        case Engine::grid_quadrature: return "grid_quadrature";
    }
    return "unknown";
}

bool ConflationResult::is_discrete() const {
    if (std::holds_alternative<DiscretePMF>(form)) return true;
    if (std::holds_alternative<GridDensity>(form)) return false;
    return std::get<DistributionSpec>(form).is_discrete();
}

DistributionSpec ConflationResult::as_spec() const {
    if (const auto* s = std::get_if<DistributionSpec>(&form)) return *s;
    if (const auto* p = std::get_if<DiscretePMF>(&form)) {
        auto atoms = p->atoms;
        double t = 0.0;
        for (const auto& [x, m] : atoms) t += m;
        for (auto& [x, m] : atoms) m /= t;
        return DistributionSpec::pmf(std::move(atoms));
    }
    const auto& g = std::get<GridDensity>(form);
    return DistributionSpec::grid(g.points, g.values);
}

std::optional<double> ConflationResult::mean() const { return as_spec().mean(); }
std::optional<double> ConflationResult::variance() const { return as_spec().variance(); }

// --- compatibility ---------------------------------------------------------------

bool compatible(const std::vector<DistributionSpec>& specs) {
    if (specs.empty()) throw ArgumentError("compatible: no inputs");
    if (specs.size() == 1) return true;

    bool all_discrete = true;
    for (const auto& s : specs) all_discrete = all_discrete && s.is_discrete();

    if (all_discrete) {
        std::vector<std::pair<double, double>> atoms;
        common_atom_products(specs, atoms, 1e-12, 1u << 16);
        return !atoms.empty();
    }

    double lo = -inf, hi = inf;
    std::vector<DistributionSpec> discrete;
    for (const auto& s : specs) {
        if (s.is_discrete()) {
            discrete.push_back(s);
            continue;
        }
        auto h = s.support().hull();
        lo = std::max(lo, h.first);
        hi = std::min(hi, h.second);
    }
    if (!(lo < hi)) return false;
    if (discrete.empty()) return true;

    // mixed inputs: some common atom must carry positive density under every
    // continuous input
    std::vector<std::pair<double, double>> atoms;
    common_atom_products(discrete, atoms, 1e-12, 1u << 16);
    for (const auto& [x, m] : atoms) {
        double dens = 1.0;
        for (const auto& s : specs)
            if (!s.is_discrete()) dens *= s.eval(x);
        if (dens > 0.0) return true;
    }
    return false;
}

// --- discrete engine ---------------------------------------------------------------

ConflationResult conflate_discrete(const std::vector<DistributionSpec>& specs_in) {
    if (specs_in.empty()) throw ArgumentError("conflate_discrete: no inputs");
    for (const auto& s : specs_in)
        if (!s.is_discrete())
            throw ArgumentError("conflate_discrete: all inputs must be discrete");
    const auto specs = sorted_specs(specs_in);

    std::vector<std::pair<double, double>> products;
    double tail = common_atom_products(specs, products);
    double norm = 0.0;
    for (const auto& [x, p] : products) norm += p;
    if (products.empty() || !(norm > 0.0))
        throw IncompatibilityError("conflation undefined: no common atoms");

    DiscretePMF pmf;
    pmf.atoms.reserve(products.size());
    for (const auto& [x, p] : products) pmf.atoms.emplace_back(x, p / norm);
    pmf.tail_bound = tail / norm;

    ConflationResult r;
    r.form = std::move(pmf);
    r.norm_constant = norm;
    r.engine = Engine::discrete_product;
    return r;
}

// --- grid engine -------------------------------------------------------------------

namespace {

struct GridEval {
    std::vector<double> points;
    std::vector<double> logv;   // log density product at each point
    double log_norm = -inf;     // log trapezoid integral
};

// Merged quantile ladders: one per input, one uniform, plus geometric ladders
// hugging finite support edges (segments the quantile ladders cannot reach).
std::vector<double> build_grid(const std::vector<DistributionSpec>& specs, double support_lo,
                               double support_hi, double clip_lo, double clip_hi,
                               int budget, int edge_depth) {
    std::vector<double> pts;
    pts.reserve(std::size_t(budget) + 64);
    const int m = std::max(16, int(budget / (specs.size() + 1)));
    const double eps = 1e-9;
    for (const auto& s : specs) {
        for (int i = 0; i < m; ++i) {
            double u = eps + (1.0 - 2.0 * eps) * double(i) / double(m - 1);
            double x = s.quantile(u);
            if (x > clip_lo && x < clip_hi) pts.push_back(x);
        }
    }
    for (int i = 0; i < m; ++i)
        pts.push_back(clip_lo + (clip_hi - clip_lo) * double(i) / double(m - 1));
    // Edge ladders run to the support boundary itself (below the quantile
    // clip): they are the probes that expose non-integrable products.
    const double width = clip_hi - clip_lo;
    if (std::isfinite(support_lo)) {
        for (int r = 1; r <= edge_depth; ++r) {
            double x = support_lo + width * std::pow(10.0, -r);
            if (x > support_lo && x < clip_hi) pts.push_back(x);
        }
    }
    if (std::isfinite(support_hi)) {
        for (int r = 1; r <= edge_depth; ++r) {
            double x = support_hi - width * std::pow(10.0, -r);
            if (x > clip_lo && x < support_hi) pts.push_back(x);
        }
    }
    pts.push_back(clip_lo);
    pts.push_back(clip_hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

GridEval evaluate_grid(const std::vector<DistributionSpec>& specs, std::vector<double> pts) {
    GridEval g;
    g.points = std::move(pts);
    const std::size_t n = g.points.size();
    g.logv.assign(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double l = 0.0;
        for (const auto& s : specs) l += s.log_eval(g.points[i]);
        g.logv[i] = l;
    });
    // log of the trapezoid integral, log-sum-exp style
    double lmax = -inf;
    for (std::size_t i = 0; i < n; ++i) lmax = std::max(lmax, g.logv[i]);
    if (!std::isfinite(lmax)) {
        g.log_norm = -inf;
        return g;
    }
    double acc = parallel_sum(n, [&](std::size_t i) {
        double w = 0.0;
        if (i > 0) w += 0.5 * (g.points[i] - g.points[i - 1]);
        if (i + 1 < n) w += 0.5 * (g.points[i + 1] - g.points[i]);
        return std::isfinite(g.logv[i]) ? w * std::exp(g.logv[i] - lmax) : 0.0;
    });
    g.log_norm = lmax + std::log(acc);
    return g;
}

double mass_median(const GridEval& g) {
    const std::size_t n = g.points.size();
    double lmax = -inf;
    for (double l : g.logv) lmax = std::max(lmax, l);
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ww = 0.0;
        if (i > 0) ww += 0.5 * (g.points[i] - g.points[i - 1]);
        if (i + 1 < n) ww += 0.5 * (g.points[i + 1] - g.points[i]);
        w[i] = std::isfinite(g.logv[i]) ? ww * std::exp(g.logv[i] - lmax) : 0.0;
        total += w[i];
    }
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += w[i];
        if (cum >= 0.5 * total) return g.points[i];
    }
    return g.points.back();
}

}  // namespace

ConflationResult conflate_grid(const std::vector<DistributionSpec>& specs_in,
                               const GridOptions& options) {
    if (specs_in.empty()) throw ArgumentError("conflate_grid: no inputs");
    for (const auto& s : specs_in)
        if (s.is_discrete())
            throw ArgumentError("conflate_grid: all inputs must be absolutely continuous");
    const auto specs = sorted_specs(specs_in);

    double support_lo = -inf, support_hi = inf;
    for (const auto& s : specs) {
        auto h = s.support().hull();
        support_lo = std::max(support_lo, h.first);
        support_hi = std::min(support_hi, h.second);
    }
    if (!(support_lo < support_hi))
        throw IncompatibilityError("conflate_grid: supports do not overlap");

    ConflationResult r;
    r.engine = Engine::grid_quadrature;

    GridEval g;
    if (!options.points.empty()) {
        auto pts = options.points;
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (pts.size() < 2) throw ArgumentError("conflate_grid: explicit grid needs >= 2 points");
        g = evaluate_grid(specs, std::move(pts));
        if (!std::isfinite(g.log_norm))
            throw IncompatibilityError("conflate_grid: density product vanishes on the grid");
    } else {
        double qlo = inf, qhi = -inf;
        for (const auto& s : specs) {
            qlo = std::min(qlo, s.quantile(1e-9));
            qhi = std::max(qhi, s.quantile(1.0 - 1e-9));
        }
        double clip_lo = std::max(support_lo, qlo);
        double clip_hi = std::min(support_hi, qhi);
        if (!(clip_lo < clip_hi))
            throw IncompatibilityError("conflate_grid: supports do not overlap");

        int budget = std::max(256, options.initial_points);
        int depth = 18;
        g = evaluate_grid(specs, build_grid(specs, support_lo, support_hi, clip_lo, clip_hi,
                                            budget, depth));
        if (!std::isfinite(g.log_norm))
            throw IncompatibilityError("conflate_grid: density product vanishes on the grid");
        int diverging_steps = 0;
        bool stabilized = false;
        for (int k = 1; k <= options.max_refinements; ++k) {
            budget *= 2;
            depth += 4;
            GridEval next = evaluate_grid(
                specs, build_grid(specs, support_lo, support_hi, clip_lo, clip_hi, budget, depth));
            double dlog = std::fabs(next.log_norm - g.log_norm);
            g = std::move(next);
            if (k <= 2 && dlog > std::log(1.10)) ++diverging_steps;
            if (k == 2 && diverging_steps == 2) {
                // Density product is not integrable: report the concentration
                // point instead of a density.
                double x_star = mass_median(g);
                DiscretePMF point;
                point.atoms.emplace_back(x_star, 1.0);
                r.form = std::move(point);
                r.norm_constant = inf;
                r.warnings.push_back(
                    "NonIntegrableProduct: density product has no finite normalizer; "
                    "mass concentrates near x = " + format_double(x_star));
                return r;
            }
            if (dlog <= options.stabilization_tol) {
                stabilized = true;
                break;
            }
        }
        if (!stabilized)
            r.warnings.push_back("normalizer not stabilized to tolerance within refinement budget");
    }

    std::vector<double> values(g.points.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = std::isfinite(g.logv[i]) ? std::exp(g.logv[i] - g.log_norm) : 0.0;
    }
    auto spec = DistributionSpec::grid(g.points, std::move(values));
    r.form = *spec.get_if<GridDensity>();
    r.norm_constant = std::exp(g.log_norm);
    if (r.norm_constant == 0.0)
        r.warnings.push_back("normalizer underflowed double range; density is normalized in log space");
    return r;
}

// --- closed-form engine --------------------------------------------------------------

namespace {

enum class ClosedFormStatus { ok, not_applicable, invalid };

ClosedFormStatus try_closed_form(const std::vector<DistributionSpec>& specs,
                                 ConflationResult* out, std::string* why_invalid) {
    const std::size_t n = specs.size();
    const std::string kind = specs[0].kind();

    // poisson and cmp close jointly: pmf products stay ∝ λ^k/(k!)^ν.
    bool all_poisson_cmp = true;
    for (const auto& s : specs)
        all_poisson_cmp = all_poisson_cmp && (s.kind() == "poisson" || s.kind() == "cmp");
    if (all_poisson_cmp) {
        double lambda = 1.0, log_inputs = 0.0;
        long long nu = 0;
        for (const auto& s : specs) {
            if (const auto* p = s.get_if<Poisson>()) {
                lambda *= p->lambda;
                nu += 1;
                log_inputs += p->lambda;  // log e^lambda
            } else {
                const auto* c = s.get_if<Cmp>();
                lambda *= c->lambda;
                nu += c->nu;
                log_inputs += c->log_norm;
            }
        }
        auto spec = DistributionSpec::cmp(lambda, nu);
        out->norm_constant = std::exp(spec.get_if<Cmp>()->log_norm - log_inputs);
        out->form = std::move(spec);
        out->engine = Engine::closed_form;
        return ClosedFormStatus::ok;
    }

    for (const auto& s : specs)
        if (s.kind() != kind) return ClosedFormStatus::not_applicable;

    auto finish = [&](DistributionSpec spec, double norm) {
        out->form = std::move(spec);
        out->norm_constant = norm;
        out->engine = Engine::closed_form;
        return ClosedFormStatus::ok;
    };

    if (kind == "normal") {
        std::vector<double> means, vars;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Normal>();
            means.push_back(f->mu);
            vars.push_back(f->sigma2);
        }
        auto [mean, variance] = gaussian_conflation_params(means, vars);
        double w = 0.0, mw = 0.0, m2w = 0.0, log_prod_var = 0.0;
        for (std::size_t i = 0; i < means.size(); ++i) {
            double wi = 1.0 / vars[i];
            w += wi;
            mw += means[i] * wi;
            m2w += means[i] * means[i] * wi;
            log_prod_var += std::log(vars[i]);
        }
        double b = m2w - mw * mw / w;
        double log_norm = -0.5 * b - 0.5 * (double(n - 1) * std::log(2.0 * sf::pi) +
                                            log_prod_var + std::log(w));
        return finish(DistributionSpec::normal(mean, variance), std::exp(log_norm));
    }
    if (kind == "bernoulli") {
        double p1 = 1.0, p0 = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Bernoulli>();
            p1 *= f->p;
            p0 *= 1.0 - f->p;
        }
        if (p1 + p0 <= 0.0)
            throw IncompatibilityError("conflation undefined: no common atoms");
        return finish(DistributionSpec::bernoulli(p1 / (p1 + p0)), p1 + p0);
    }
    if (kind == "geometric") {
        double q = 1.0, pprod = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Geometric>();
            q *= 1.0 - f->p;
            pprod *= f->p;
        }
        double p = 1.0 - q;
        return finish(DistributionSpec::geometric(p), pprod / p);
    }
    if (kind == "discrete_uniform") {
        long long nmin = lattice_unbounded;
        double inv = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<DiscreteUniform>();
            nmin = std::min(nmin, f->n);
            inv /= double(f->n);
        }
        return finish(DistributionSpec::discrete_uniform(nmin), double(nmin) * inv);
    }
    if (kind == "zipf") {
        double alpha = 0.0, denom = 1.0;
        long long nmin = lattice_unbounded;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Zipf>();
            alpha += f->alpha;
            nmin = std::min(nmin, f->n);
            denom *= f->norm;
        }
        auto spec = DistributionSpec::zipf(alpha, nmin);
        double norm = spec.get_if<Zipf>()->norm / denom;
        return finish(std::move(spec), norm);
    }
    if (kind == "zeta") {
        double alpha = 0.0, denom = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Zeta>();
            alpha += f->alpha;
            denom *= f->norm;
        }
        auto spec = DistributionSpec::zeta(alpha);
        double norm = spec.get_if<Zeta>()->norm / denom;
        return finish(std::move(spec), norm);
    }
    if (kind == "gamma") {
        double alpha = 0.0, winv = 0.0, log_denom = 0.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Gamma>();
            alpha += f->alpha;
            winv += 1.0 / f->beta;
            log_denom += std::lgamma(f->alpha) + f->alpha * std::log(f->beta);
        }
        alpha -= double(n - 1);
        if (!(alpha > 0.0)) {
            if (why_invalid)
                *why_invalid = "gamma closure parameter alpha = " + format_double(alpha) +
                               " <= 0; product density is not integrable at 0";
            return ClosedFormStatus::invalid;
        }
        double beta = 1.0 / winv;
        double log_norm = std::lgamma(alpha) + alpha * std::log(beta) - log_denom;
        return finish(DistributionSpec::gamma(alpha, beta), std::exp(log_norm));
    }
    if (kind == "beta") {
        double a = 0.0, b = 0.0, log_denom = 0.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<BetaDist>();
            a += f->alpha;
            b += f->beta;
            log_denom += sf::log_beta(f->alpha, f->beta);
        }
        a -= double(n - 1);
        b -= double(n - 1);
        if (!(a > 0.0) || !(b > 0.0)) {
            if (why_invalid)
                *why_invalid = "beta closure parameters (" + format_double(a) + ", " +
                               format_double(b) + ") outside the family; product not integrable";
            return ClosedFormStatus::invalid;
        }
        return finish(DistributionSpec::beta(a, b), std::exp(sf::log_beta(a, b) - log_denom));
    }
    if (kind == "uniform") {
        double a = -inf, b = inf, denom = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Uniform>();
            a = std::max(a, f->a);
            b = std::min(b, f->b);
            denom *= f->b - f->a;
        }
        if (!(a < b))
            throw IncompatibilityError("conflate: uniform supports do not overlap");
        return finish(DistributionSpec::uniform(a, b), (b - a) / denom);
    }
    if (kind == "laplace") {
        double winv = 0.0, denom = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Laplace>();
            winv += 1.0 / f->scale;
            denom *= 2.0 * f->scale;
        }
        double scale = 1.0 / winv;
        return finish(DistributionSpec::laplace(scale), 2.0 * scale / denom);
    }
    if (kind == "pareto") {
        double alpha = double(n) - 1.0, beta = -inf, log_num = 0.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Pareto>();
            alpha += f->alpha;
            beta = std::max(beta, f->beta);
            log_num += std::log(f->alpha) + f->alpha * std::log(f->beta);
        }
        double log_norm = log_num - alpha * std::log(beta) - std::log(alpha);
        return finish(DistributionSpec::pareto(alpha, beta), std::exp(log_norm));
    }
    if (kind == "exponential") {
        double winv = 0.0, denom = 1.0;
        for (const auto& s : specs) {
            const auto* f = s.get_if<Exponential>();
            winv += 1.0 / f->mean;
            denom *= f->mean;
        }
        double mean = 1.0 / winv;
        return finish(DistributionSpec::exponential(mean), mean / denom);
    }
    return ClosedFormStatus::not_applicable;
}

}  // namespace

ConflationResult conflate_closed_form(const std::vector<DistributionSpec>& specs_in) {
    if (specs_in.empty()) throw ArgumentError("conflate_closed_form: no inputs");
    const auto specs = sorted_specs(specs_in);
    ConflationResult out;
    std::string why;
    switch (try_closed_form(specs, &out, &why)) {
        case ClosedFormStatus::ok:
            return out;
        case ClosedFormStatus::invalid: {
            auto r = conflate_grid(specs);
            r.warnings.insert(r.warnings.begin(),
                              "closed-form rule not applicable: " + why + "; grid engine used");
            return r;
        }
        case ClosedFormStatus::not_applicable:
        default:
            throw ArgumentError("conflate_closed_form: inputs are not a single closure family");
    }
}

// --- truncated closure ------------------------------------------------------------------

ConflationResult conflate_truncated(const std::vector<DistributionSpec>& specs_in) {
    if (specs_in.empty()) throw ArgumentError("conflate_truncated: no inputs");
    const auto specs = sorted_specs(specs_in);
    std::vector<DistributionSpec> inners;
    double lo = -inf, hi = inf, denom = 1.0;
    std::string inner_kind;
    for (const auto& s : specs) {
        const auto* t = s.get_if<Truncated>();
        if (!t) throw ArgumentError("conflate_truncated: all inputs must be truncated");
        inners.push_back(*t->inner);
        lo = std::max(lo, t->lo);
        hi = std::min(hi, t->hi);
        denom *= t->window_prob;
        if (inner_kind.empty()) inner_kind = t->inner->kind();
        else if (inner_kind != t->inner->kind())
            throw ArgumentError("conflate_truncated: inner families differ");
    }
    static const char* closed[] = {"normal", "exponential", "gamma", "laplace", "pareto"};
    bool ok = false;
    for (const char* k : closed) ok = ok || inner_kind == k;
    if (!ok)
        throw ArgumentError("conflate_truncated: inner family '" + inner_kind +
                            "' has no truncated closure rule");
    if (!(lo < hi))
        throw IncompatibilityError("conflate_truncated: windows do not intersect");

    ConflationResult inner_res;
    std::string why;
    if (try_closed_form(sorted_specs(inners), &inner_res, &why) != ClosedFormStatus::ok) {
        auto r = conflate_grid(specs);
        r.warnings.insert(r.warnings.begin(),
                          "closed-form rule not applicable: " + why + "; grid engine used");
        return r;
    }
    const auto& inner_spec = std::get<DistributionSpec>(inner_res.form);
    DistributionSpec trunc = [&] {
        try {
            return DistributionSpec::truncated(inner_spec, lo, hi);
        } catch (const ValidationError& e) {
            throw IncompatibilityError(std::string("conflate_truncated: ") + e.what());
        }
    }();
    double window_mass = trunc.get_if<Truncated>()->window_prob;

    ConflationResult r;
    r.form = std::move(trunc);
    r.norm_constant = inner_res.norm_constant * window_mass / denom;
    r.engine = Engine::closed_form;
    return r;
}

// --- mixed engine and dispatcher ----------------------------------------------------------

namespace {

ConflationResult conflate_mixed(const std::vector<DistributionSpec>& specs) {
    std::vector<DistributionSpec> discrete, cont;
    for (const auto& s : specs)
        (s.is_discrete() ? discrete : cont).push_back(s);

    std::vector<std::pair<double, double>> atom_products;
    double dtail = common_atom_products(discrete, atom_products);

    std::vector<std::pair<double, double>> weighted;
    double norm = 0.0;
    double max_dens = 0.0;
    for (const auto& [x, p] : atom_products) {
        double v = p;
        double dens = 1.0;
        for (const auto& s : cont) dens *= s.eval(x);
        max_dens = std::max(max_dens, dens);
        v *= dens;
        if (v > 0.0) {
            weighted.emplace_back(x, v);
            norm += v;
        }
    }
    if (weighted.empty() || !(norm > 0.0))
        throw IncompatibilityError(
            "conflation undefined: no common atom lies inside every continuous support");

    DiscretePMF pmf;
    for (const auto& [x, v] : weighted) pmf.atoms.emplace_back(x, v / norm);
    pmf.tail_bound = max_dens > 0.0 ? dtail * max_dens / norm : 0.0;

    ConflationResult r;
    r.form = std::move(pmf);
    r.norm_constant = norm;
    r.engine = Engine::discrete_product;
    r.warnings.push_back(
        "mixed discrete and continuous inputs: common atom masses weighted by the "
        "continuous density values and renormalized");
    return r;
}

ConflationResult identity_result(const DistributionSpec& s) {
    ConflationResult r;
    r.norm_constant = 1.0;
    r.engine = Engine::closed_form;
    if (const auto* p = s.get_if<PmfTable>()) {
        DiscretePMF pmf;
        pmf.atoms = p->atoms;
        r.form = std::move(pmf);
    } else if (const auto* g = s.get_if<GridDensity>()) {
        r.form = *g;
    } else {
        r.form = s;
    }
    return r;
}

}  // namespace

ConflationResult conflate(const std::vector<DistributionSpec>& specs_in,
                          const ConflateOptions& options) {
    if (specs_in.empty()) throw ArgumentError("conflate: no inputs");
    const auto specs = sorted_specs(specs_in);
    if (specs.size() == 1) return identity_result(specs[0]);

    // truncated closure first: same inner family with a truncation-stable rule
    bool all_trunc = true;
    for (const auto& s : specs) all_trunc = all_trunc && s.kind() == "truncated";
    if (all_trunc) {
        std::string inner_kind = specs[0].get_if<Truncated>()->inner->kind();
        bool same = true;
        for (const auto& s : specs)
            same = same && s.get_if<Truncated>()->inner->kind() == inner_kind;
        static const char* closed[] = {"normal", "exponential", "gamma", "laplace", "pareto"};
        bool closable = false;
        for (const char* k : closed) closable = closable || inner_kind == k;
        if (same && closable) return conflate_truncated(specs);
    }

    ConflationResult out;
    std::string why;
    switch (try_closed_form(specs, &out, &why)) {
        case ClosedFormStatus::ok:
            return out;
        case ClosedFormStatus::invalid: {
            auto r = conflate_grid(specs, options.grid);
            r.warnings.insert(r.warnings.begin(),
                              "closed-form rule not applicable: " + why + "; grid engine used");
            return r;
        }
        case ClosedFormStatus::not_applicable:
            break;
    }

    bool any_discrete = false, all_discrete = true;
    for (const auto& s : specs) {
        any_discrete = any_discrete || s.is_discrete();
        all_discrete = all_discrete && s.is_discrete();
    }
    if (all_discrete) return conflate_discrete(specs);
    if (!any_discrete) return conflate_grid(specs, options.grid);
    return conflate_mixed(specs);
}

}  // namespace conflate
