"""Sensitivity analysis for discrete Bayesian networks.

Given a query constraint Pr(z | e) >= p (or <= p), this package finds
single-parameter, single-CPT, and two-CPT changes that enforce it, and
ranks them by a log-odds distance measure that bounds how much any other
query can move.
"""

from .model import (
    BayesianNetwork,
    Cpt,
    Evidence,
    ParameterDelta,
    ParameterRef,
    Variable,
    apply_delta,
    apply_deltas,
    log_odds,
    validate_network,
)
from .engine import (
    brute_force_joint,
    covaried_derivatives,
    joint_probability,
    posterior,
    raw_partial,
    second_covaried_derivatives,
)

__all__ = [
    "BayesianNetwork",
    "Cpt",
    "Evidence",
    "ParameterDelta",
    "ParameterRef",
    "Variable",
    "apply_delta",
    "apply_deltas",
    "log_odds",
    "validate_network",
    "brute_force_joint",
    "covaried_derivatives",
    "joint_probability",
    "posterior",
    "raw_partial",
    "second_covaried_derivatives",
]
