"""Smoke tests for the python bindings: the main operations round-trip
through JSON and reproduce the worked-example numbers."""

import math

import pytest

import conflate


def normal(mu, sigma2):
    return {"kind": "normal", "params": {"mu": mu, "sigma2": sigma2}}


def bernoulli(p):
    return {"kind": "bernoulli", "params": {"p": p}}


def test_bernoulli_conflation():
    r = conflate.conflate([bernoulli(1.0 / 3.0), bernoulli(0.25)])
    assert r["engine"] == "closed_form"
    assert math.isclose(r["norm_constant"], 7.0 / 12.0, rel_tol=1e-12)
    assert math.isclose(r["form"]["params"]["p"], 1.0 / 7.0, rel_tol=1e-12)


def test_gaussian_conflation_and_blue():
    r = conflate.conflate([normal(1, 1), normal(2, 4)])
    assert r["form"]["params"]["mu"] == pytest.approx(1.2, abs=1e-15)
    assert r["form"]["params"]["sigma2"] == pytest.approx(0.8, abs=1e-15)

    mean, var = conflate.gaussian_conflation_params([1.0, 2.0], [1.0, 4.0])
    assert mean == pytest.approx(1.2)
    assert var == pytest.approx(0.8)

    est = conflate.blue_estimate([0.5, 0.45], [1 / 12, 1.21 / 12])
    assert est["value"] < 0.48


def test_spec_evaluation_and_validation():
    assert conflate.eval_density(normal(0, 1), 0.0) == pytest.approx(
        1.0 / math.sqrt(2 * math.pi)
    )
    assert conflate.cdf(normal(0, 1), 0.0) == pytest.approx(0.5)
    assert conflate.quantile(normal(0, 1), 0.975) == pytest.approx(1.959964, abs=1e-5)
    with pytest.raises(ValueError):
        conflate.validate_spec({"kind": "zeta", "params": {"alpha": 1.0}})
    assert conflate.compatible([normal(0, 1), bernoulli(0.5)])


def test_oracle_and_dyadic():
    mu = conflate.mu_j([bernoulli(1 / 3), bernoulli(0.25)], 4, -2.0, 3.0)
    masses = dict((x, m) for x, m in mu["masses"])
    assert masses[0.0] == pytest.approx(0.5, abs=1e-15)
    assert masses[1.0] == pytest.approx(1.0 / 12.0, abs=1e-15)

    rep = conflate.oracle_conflation([normal(0, 1), normal(0, 1)], j_max=8)
    assert rep["monotonicity_ok"] and not rep["escape_flag"]


def test_diagnostics():
    specs = [bernoulli(1 / 3), bernoulli(0.25)]
    q = conflate.conflate(specs)["form"]
    info = conflate.max_information_loss(q, specs)
    assert info["attains_bound"]
    assert info["bound"] == pytest.approx(math.log2(12 / 7), abs=1e-9)
    mlr = conflate.mlr_delta(q, specs)
    assert mlr["delta"] == pytest.approx(5 / 7, abs=1e-12)
    assert conflate.proportionality_check(q, specs)["ok"]
    resid = conflate.convolution_check(normal(0, 1), normal(0, 1), 10.0, 501)
    assert resid <= 1e-6


def test_sampler_determinism():
    a = conflate.sample_agree([bernoulli(1 / 3), bernoulli(0.25)], n_target=2000, seed=42)
    b = conflate.sample_agree([bernoulli(1 / 3), bernoulli(0.25)], n_target=2000, seed=42)
    assert a["values"] == b["values"]
    assert a["acceptance_rate"] == pytest.approx(7 / 12, abs=0.05)


def test_incompatibility_maps_to_exception():
    with pytest.raises(ArithmeticError):
        conflate.conflate(
            [
                {"kind": "pmf", "atoms": [[0.0, 1.0]]},
                {"kind": "pmf", "atoms": [[1.0, 1.0]]},
            ]
        )


def test_verify_suite():
    assert conflate.verify()["all_pass"]
