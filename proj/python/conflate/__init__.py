"""Conflation of probability distributions: normalized-product consolidation.

Thin JSON-dict wrappers over the compiled core.  Distribution specs are dicts
like {"kind": "normal", "params": {"mu": 0.0, "sigma2": 1.0}}; see the README
for the full catalog.
"""

import json as _json

from _conflate import (  # noqa: F401
    ArgumentError,
    IncompatibilityError,
    SamplingError,
    ValidationError,
    convolution_check as _convolution_check,
    gaussian_conflation_params,
)
import _conflate as _core

__all__ = [
    "ArgumentError",
    "IncompatibilityError",
    "SamplingError",
    "ValidationError",
    "blue_estimate",
    "cdf",
    "compatible",
    "conflate",
    "convolution_check",
    "eval_density",
    "gaussian_conflation_params",
    "interval_prob",
    "max_information_loss",
    "mlr_delta",
    "mu_j",
    "oracle_conflation",
    "proportionality_check",
    "quantile",
    "sample_agree",
    "validate_spec",
    "verify",
]


def _dumps(obj):
    return _json.dumps(obj)


def validate_spec(spec):
    return _json.loads(_core.validate_spec(_dumps(spec)))


def eval_density(spec, x):
    return _core.eval(_dumps(spec), x)


def cdf(spec, x):
    return _core.cdf(_dumps(spec), x)


def quantile(spec, u):
    return _core.quantile(_dumps(spec), u)


def interval_prob(spec, a, b):
    return _core.interval_prob(_dumps(spec), a, b)


def compatible(specs):
    return _core.compatible(_dumps(list(specs)))


def conflate(specs, grid_points=0):
    return _json.loads(_core.conflate(_dumps(list(specs)), grid_points))


def mu_j(specs, level, lo, hi):
    return _json.loads(_core.mu_j(_dumps(list(specs)), level, lo, hi))


def oracle_conflation(specs, j_max=12, tv_tol=1e-4):
    return _json.loads(_core.oracle_conflation(_dumps(list(specs)), j_max, tv_tol))


def max_information_loss(q, specs, ac_level=8):
    return _json.loads(_core.max_information_loss(_dumps(q), _dumps(list(specs)), ac_level))


def mlr_delta(q, specs):
    return _json.loads(_core.mlr_delta(_dumps(q), _dumps(list(specs))))


def proportionality_check(q, specs, tol=1e-9):
    return _json.loads(_core.proportionality_check(_dumps(q), _dumps(list(specs)), tol))


def convolution_check(a, b, t_max=20.0, n_points=8193):
    return _convolution_check(_dumps(a), _dumps(b), t_max, n_points)


def blue_estimate(observations, variances):
    return _json.loads(_core.blue_estimate(list(observations), list(variances)))


def sample_agree(specs, epsilon=0.0, n_target=100000, seed=0, proposal_cap=100000000):
    return _json.loads(
        _core.sample_agree(_dumps(list(specs)), epsilon, n_target, seed, proposal_cap)
    )


def verify():
    return _json.loads(_core.verify())
