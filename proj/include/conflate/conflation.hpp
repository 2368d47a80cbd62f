#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conflate/discrete_pmf.hpp"
#include "conflate/distribution.hpp"

namespace conflate {

enum class Engine { closed_form, discrete_product, grid_quadrature };

const char* engine_name(Engine e);

// The conflation &(P_1,...,P_n): a closed-form family member, an exact
// discrete pmf, or a quadrature grid density, together with the normalizing
// constant (Σ_A Π p_i for discrete inputs, ∫ Π f_i for a.c. ones).
// norm_constant is +inf when the density product is not integrable; the form
// is then a point mass at the concentration estimate.
struct ConflationResult {
    std::variant<DiscretePMF, GridDensity, DistributionSpec> form;
    double norm_constant = 1.0;
    Engine engine = Engine::closed_form;
    std::vector<std::string> warnings;

    bool is_discrete() const;
    // The result repackaged as a DistributionSpec for downstream evaluation.
    DistributionSpec as_spec() const;
    std::optional<double> mean() const;
    std::optional<double> variance() const;
};

struct GridOptions {
    std::vector<double> points;   // explicit grid; empty = auto
    int initial_points = 4096;    // auto mode: starting budget,
    int max_refinements = 8;      //   doubled until the normalizer stabilizes
    double stabilization_tol = 1e-9;
};

struct ConflateOptions {
    GridOptions grid;
};

// Enumerates the common atoms of all-discrete inputs with the raw product
// masses Π p_i(x), ascending.  Returns a bound on the product mass beyond the
// enumeration (at most the smallest single-input tail).
double common_atom_products(const std::vector<DistributionSpec>& specs,
                            std::vector<std::pair<double, double>>& out,
                            double tail_cut = 1e-12, std::size_t cap = 1u << 22);

// Support-level compatibility: a common atom for all-discrete inputs,
// overlapping support intervals (with an interior common atom when discrete
// inputs are mixed in) otherwise.  Def-2.5-per-level checks are available via
// mu_j directly.
bool compatible(const std::vector<DistributionSpec>& specs);

// Exact normalized product over the common atoms.  Throws
// IncompatibilityError when there is no common atom.
ConflationResult conflate_discrete(const std::vector<DistributionSpec>& specs);

// Normalized density product by trapezoid quadrature on a merged
// quantile-ladder grid; detects non-integrable products while refining.
ConflationResult conflate_grid(const std::vector<DistributionSpec>& specs,
                               const GridOptions& options = {});

// Family closure rules; falls back to the grid engine with a warning when the
// derived parameters land outside the family.
ConflationResult conflate_closed_form(const std::vector<DistributionSpec>& specs);

// Truncated-family closure: conflation of same-family truncated inputs is the
// truncated conflation of the inners on the intersected window.
ConflationResult conflate_truncated(const std::vector<DistributionSpec>& specs);

// Dispatcher: identity for n = 1, then closed-form > discrete product > grid
// quadrature; mixed discrete/a.c. inputs weigh the common atoms by the
// continuous density values.  Inputs are canonically sorted first, so the
// result is byte-identical under permutation.
ConflationResult conflate(const std::vector<DistributionSpec>& specs,
                          const ConflateOptions& options = {});

}  // namespace conflate
