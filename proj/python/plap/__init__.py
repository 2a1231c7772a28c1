"""Solvers and diagnostics for the p-Laplacian segregation limit system."""

import json

from ._core import (
    Grid,
    InvalidArgument,
    IvpSpec,
    LambdaParams,
    LimitProblem,
    PlapError,
    SolutionPair,
    barrier_check,
    check_names,
    first_integral,
    ivp_solve,
    lambda_sweep,
    minimize_lambda,
    minimize_limit,
    perron_construct,
    phi_p,
    phi_p_inv,
    shoot_decaying,
    solve_free_pair,
    symmetry_defect,
)
from ._core import certify_json as _certify_json


def certify(pair, checks=()):
    """Certification report of a pair as a dict."""
    return json.loads(_certify_json(pair, list(checks)))


def solve_limit(p=2.0, R=8.0, n=801, symmetric=True, tol=1e-10):
    prob = LimitProblem()
    prob.p, prob.R, prob.n, prob.tol = p, R, n, tol
    prob.enforce_symmetry = symmetric
    return minimize_limit(prob) if symmetric else solve_free_pair(prob)


__all__ = [name for name in dir() if not name.startswith("_")]
