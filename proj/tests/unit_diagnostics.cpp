#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "conflate/conflation.hpp"
#include "conflate/diagnostics.hpp"
#include "conflate/special_functions.hpp"
#include "support/oracles.hpp"

using conflate::DistributionSpec;
using conflate::EventSet;
namespace ts = testsupport;

namespace {

const auto bern13 = DistributionSpec::bernoulli(1.0 / 3.0);
const auto bern14 = DistributionSpec::bernoulli(0.25);

// pmf on the common atoms with mass delta moved from atom j to atom i
DistributionSpec perturbed_pmf(const DistributionSpec& base, std::size_t i, std::size_t j,
                               double delta) {
    std::vector<std::pair<double, double>> atoms;
    base.enumerate_atoms(1e-15, 1u << 16, atoms);
    atoms[i].second += delta;
    atoms[j].second -= delta;
    return DistributionSpec::pmf(std::move(atoms));
}

}  // namespace

TEST_CASE("joint information of reference events") {
    auto u = DistributionSpec::uniform(0, 1);
    auto ev = EventSet::of_intervals({{0.0, 0.25}, {0.5, 0.75}});
    CHECK(conflate::joint_information({u}, ev) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(conflate::joint_information({bern13, bern14}, EventSet::of_atoms({0.0})) ==
          doctest::Approx(1.0).epsilon(1e-12));

    auto whole = EventSet::of_intervals({{-conflate::inf, conflate::inf}});
    CHECK(conflate::joint_information({bern13, bern14}, whole) ==
          doctest::Approx(0.0).epsilon(1e-12));

    CHECK(std::isinf(conflate::joint_information({u}, EventSet::of_atoms({0.5}))));
}

TEST_CASE("information loss of the conflation on single events") {
    auto q = conflate::conflate({bern13, bern14}).as_spec();
    auto ev = EventSet::of_atoms({0.0});
    CHECK(conflate::information_loss(q, {bern13, bern14}, ev) ==
          doctest::Approx(std::log2(12.0 / 7.0)).epsilon(1e-12));

    // both vanish -> zero loss by convention
    CHECK(conflate::information_loss(q, {bern13, bern14}, EventSet::of_atoms({2.0})) == 0.0);

    auto whole = EventSet::of_intervals({{-conflate::inf, conflate::inf}});
    CHECK(conflate::information_loss(q, {bern13, bern14}, whole) == 0.0);
}

TEST_CASE("conflation attains the information bound; others exceed it") {
    auto q = conflate::conflate({bern13, bern14}).as_spec();
    auto rep = conflate::max_information_loss(q, {bern13, bern14});
    CHECK(rep.bound == doctest::Approx(std::log2(12.0 / 7.0)).epsilon(1e-12));
    CHECK(std::fabs(rep.max_loss - rep.bound) <= 1e-9);
    CHECK(rep.attains_bound);

    auto off = DistributionSpec::pmf({{0.0, 0.5}, {1.0, 0.5}});
    auto rep2 = conflate::max_information_loss(off, {bern13, bern14});
    CHECK(rep2.max_loss > rep2.bound + 1e-9);
    CHECK_FALSE(rep2.attains_bound);

    auto single = conflate::max_information_loss(bern13, {bern13});
    CHECK(single.bound == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(single.max_loss == doctest::Approx(0.0).epsilon(1e-12));

    // candidate with mass off the common atoms: infinite loss
    auto outside = DistributionSpec::pmf({{0.0, 0.5}, {3.0, 0.5}});
    CHECK(std::isinf(conflate::max_information_loss(outside, {bern13, bern14}).max_loss));
}

TEST_CASE("random discrete instances: bound attained only by the conflation") {
    ts::Draw d{123};
    int instances = 0;
    while (instances < 10) {
        auto a = DistributionSpec::binomial(d.integer(2, 6), d.uniform(0.2, 0.8));
        auto b = DistributionSpec::poisson(d.uniform(1.0, 6.0));
        auto q = conflate::conflate({a, b}).as_spec();
        auto rep = conflate::max_information_loss(q, {a, b});
        CHECK(std::fabs(rep.max_loss - rep.bound) <= 1e-9);
        CHECK(rep.attains_bound);
        std::vector<std::pair<double, double>> atoms;
        q.enumerate_atoms(1e-15, 1u << 16, atoms);
        for (int rep_i = 0; rep_i < 20; ++rep_i) {
            std::size_t i = std::size_t(d.integer(0, (long long)atoms.size() - 1));
            std::size_t j = std::size_t(d.integer(0, (long long)atoms.size() - 1));
            if (i == j) continue;
            double delta = std::min(atoms[j].second * 0.5, d.uniform(1e-3, 0.05));
            auto cand = perturbed_pmf(q, i, j, delta);
            auto r2 = conflate::max_information_loss(cand, {a, b});
            CHECK(r2.max_loss > r2.bound);
        }
        ++instances;
    }
}

TEST_CASE("a.c. inputs are searched at a dyadic level") {
    auto n01 = DistributionSpec::normal(0, 1);
    auto q = conflate::conflate({n01, n01}).as_spec();
    auto rep = conflate::max_information_loss(q, {n01, n01}, 6);
    CHECK(rep.search_level == 6);
    // the level-6 bound can only be exceeded, with a gap shrinking in level
    CHECK(rep.max_loss >= rep.bound - 1e-9);
    auto rep8 = conflate::max_information_loss(q, {n01, n01}, 8);
    CHECK(rep8.max_loss - rep8.bound <= rep.max_loss - rep.bound + 1e-6);
}

TEST_CASE("mlr delta of the conflation and of defective candidates") {
    auto q = conflate::conflate({bern13, bern14}).as_spec();
    auto rep = conflate::mlr_delta(q, {bern13, bern14});
    CHECK(std::fabs(rep.delta - 5.0 / 7.0) <= 1e-12);

    auto off = DistributionSpec::pmf({{2.0, 1.0}});
    CHECK(std::isinf(conflate::mlr_delta(off, {bern13, bern14}).delta));

    // a.c. conflation with a.s.-positive product has zero spread
    auto n01 = DistributionSpec::normal(0, 1);
    auto qn = conflate::conflate({n01, n01}).as_spec();
    CHECK(conflate::mlr_delta(qn, {n01, n01}).delta <= 1e-9);

    CHECK_THROWS_AS(conflate::mlr_delta(qn, {bern13, bern14}), conflate::ArgumentError);
}

TEST_CASE("power candidates against the non-integrable pair have unit spread") {
    auto half = DistributionSpec::beta(0.5, 1.0);
    for (double alpha : {0.1, 0.25}) {
        auto cand = DistributionSpec::beta(alpha, 1.0);  // density alpha x^{alpha-1}
        auto rep = conflate::mlr_delta(cand, {half, half});
        CHECK(std::fabs(rep.delta - 1.0) <= 1e-6);
    }
}

TEST_CASE("conflation minimizes the spread among candidates") {
    ts::Draw d{456};
    auto a = DistributionSpec::binomial(4, 0.4);
    auto b = DistributionSpec::poisson(2.5);
    auto q = conflate::conflate({a, b}).as_spec();
    double dq = conflate::mlr_delta(q, {a, b}).delta;
    for (int rep_i = 0; rep_i < 50; ++rep_i) {
        std::vector<std::pair<double, double>> atoms;
        q.enumerate_atoms(1e-15, 1u << 16, atoms);
        std::size_t i = std::size_t(d.integer(0, (long long)atoms.size() - 1));
        std::size_t j = std::size_t(d.integer(0, (long long)atoms.size() - 1));
        if (i == j) continue;
        double delta = std::min(atoms[j].second * 0.5, d.uniform(1e-3, 0.05));
        double dc = conflate::mlr_delta(perturbed_pmf(q, i, j, delta), {a, b}).delta;
        CHECK(dc >= dq - 1e-12);
    }
}

TEST_CASE("proportionality holds for conflations and fails for perturbations") {
    auto q = conflate::conflate({bern13, bern14}).as_spec();
    CHECK(conflate::proportionality_check(q, {bern13, bern14}, 1e-9).ok);

    auto bad = DistributionSpec::pmf({{0.0, 6.0 / 7.0 + 0.01}, {1.0, 1.0 / 7.0 - 0.01}});
    auto rep = conflate::proportionality_check(bad, {bern13, bern14}, 1e-9);
    CHECK_FALSE(rep.ok);
    CHECK(((rep.worst_x == 0.0 && rep.worst_y == 1.0) ||
           (rep.worst_x == 1.0 && rep.worst_y == 0.0)));

    // grid conflations are proportional on their own grid by construction
    auto n01 = DistributionSpec::normal(0, 1);
    auto e1 = DistributionSpec::exponential(1);
    auto qg = conflate::conflate({n01, e1}).as_spec();
    CHECK(conflate::proportionality_check(qg, {n01, e1}, 1e-9).ok);

    // no power candidate is proportional for the non-integrable pair
    auto half = DistributionSpec::beta(0.5, 1.0);
    for (double alpha : {0.1, 0.25, 0.5, 1.0}) {
        auto cand = DistributionSpec::beta(alpha, 1.0);
        CHECK_FALSE(conflate::proportionality_check(cand, {half, half}, 1e-6).ok);
    }
}

TEST_CASE("characteristic functions: closed forms and invariants") {
    auto n01 = DistributionSpec::normal(0, 1);
    auto g = conflate::characteristic_fn(n01, 5.0, 101);
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        double want = std::exp(-0.5 * g.t[i] * g.t[i]);
        CHECK(std::abs(g.values[i] - std::complex<double>(want, 0.0)) <= 1e-12);
    }

    auto delta0 = DistributionSpec::pmf({{0.0, 1.0}});
    auto gd = conflate::characteristic_fn(delta0, 5.0, 33);
    for (const auto& v : gd.values) CHECK(std::abs(v - 1.0) <= 1e-12);

    ts::Draw d{99};
    for (const char* fam : {"gamma", "uniform", "laplace", "poisson"}) {
        auto s = ts::random_family_member(fam, d);
        auto gc = conflate::characteristic_fn(s, 8.0, 65);
        std::size_t mid = gc.t.size() / 2;
        CHECK(std::abs(gc.values[mid] - 1.0) <= 1e-9);  // psi(0) = 1
        for (std::size_t i = 0; i < gc.t.size(); ++i) {
            auto conj = std::conj(gc.values[gc.t.size() - 1 - i]);
            CHECK(std::abs(gc.values[i] - conj) <= 1e-9);  // Hermitian symmetry
        }
    }
}

TEST_CASE("convolution identity for normal pairs") {
    auto n01 = DistributionSpec::normal(0, 1);
    CHECK(conflate::convolution_check(n01, n01, 10.0, 2001) <= 1e-6);
    CHECK(conflate::convolution_check(DistributionSpec::normal(1, 1),
                                      DistributionSpec::normal(2, 4), 10.0, 2001) <= 1e-5);
    CHECK_THROWS_AS(conflate::convolution_check(DistributionSpec::pmf({{0.0, 1.0}}),
                                                DistributionSpec::pmf({{0.0, 1.0}})),
                    conflate::ArgumentError);
    CHECK_THROWS_AS(conflate::convolution_check(DistributionSpec::uniform(0, 1),
                                                DistributionSpec::uniform(0, 1)),
                    conflate::ArgumentError);
}

TEST_CASE("convolution identity beyond normals") {
    auto l = DistributionSpec::laplace(1.0);
    CHECK(conflate::convolution_check(l, l, 5.0, 501) <= 1e-3);
    auto g1 = DistributionSpec::gamma(2.0, 1.0);
    auto g2 = DistributionSpec::gamma(3.0, 0.5);
    CHECK(conflate::convolution_check(g1, g2, 5.0, 501) <= 1e-3);
}
