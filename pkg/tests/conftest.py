"""Shared fixtures and enumeration-based oracles for the test suite.

The oracle helpers below work by explicit world enumeration, independent of
the library's elimination machinery, so they stay honest references for it.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from bnsense.fixtures import fire_network, tiny2_network, tiny3_network
from bnsense.model import BayesianNetwork, Cpt, Variable


@pytest.fixture
def fire():
    return fire_network()


@pytest.fixture
def tiny2():
    return tiny2_network()


@pytest.fixture
def tiny3():
    return tiny3_network()


def random_network(rng, n_vars=None, max_parents=3, min_prob=0.0) -> BayesianNetwork:
    """Random binary DAG; min_prob > 0 keeps every entry away from 0/1."""
    n = int(n_vars if n_vars is not None else rng.integers(3, 13))
    variables = tuple(Variable(f"V{i}", ("t", "f")) for i in range(n))
    cpts = []
    for i, v in enumerate(variables):
        k = int(rng.integers(0, min(i, max_parents) + 1))
        parent_idx = sorted(rng.choice(i, size=k, replace=False)) if k else []
        parents = tuple(variables[j] for j in parent_idx)
        n_inst = 2 ** len(parents)
        p = rng.uniform(min_prob, 1.0 - min_prob, size=n_inst)
        table = np.stack([p, 1.0 - p], axis=-1).reshape((2,) * len(parents) + (2,))
        cpts.append(Cpt(v, parents, table))
    return BayesianNetwork(variables, tuple(cpts))


def random_evidence(rng, net, max_vars=3) -> dict[str, str]:
    k = int(rng.integers(0, max_vars + 1))
    if k == 0:
        return {}
    names = rng.choice([v.name for v in net.variables], size=k, replace=False)
    return {str(name): net.variable(str(name)).values[int(rng.integers(0, 2))] for name in names}


def world_columns(net):
    cards = [v.n_states for v in net.variables]
    n = math.prod(cards)
    return dict(zip((v.name for v in net.variables), np.unravel_index(np.arange(n), cards))), n


def enum_joint(net, evidence) -> float:
    """World-enumeration Pr(evidence), independent of the engine module."""
    cols, n = world_columns(net)
    total = np.ones(n)
    for cpt in net.cpts:
        sel = tuple(cols[p.name] for p in cpt.parents) + (cols[cpt.variable.name],)
        total = total * cpt.table[sel]
    mask = np.ones(n, dtype=bool)
    for name, state in evidence.items():
        mask &= cols[name] == net.variable(name).index_of(state)
    return float(total[mask].sum())


def surface_min_distance(net, constraint, var, n_grid=200) -> float:
    """Independent optimality oracle for two-row CPTs: extract the query's
    multilinear coefficients by enumeration, then for each grid value of one
    row's log-odds step bisect the other row's step onto the constraint
    surface; return the smallest max-|step| over the sampled surface."""
    from bnsense.model import from_log_odds, log_odds

    ze = dict(constraint.evidence)
    ze.update(constraint.target)
    g_e = enum_family_coefficients(net, constraint.evidence, var)
    g_ze = enum_family_coefficients(net, ze, var)
    cpt = net.cpt(var)
    assert cpt.n_instantiations == 2
    thetas = cpt.rows[:, 0].copy()
    ce = g_e[:, 0] - g_e[:, 1]
    cze = g_ze[:, 0] - g_ze[:, 1]
    base_e = float((g_e * cpt.rows).sum())
    base_ze = float((g_ze * cpt.rows).sum())
    p = constraint.threshold

    def post(d1, d2):
        x1 = from_log_odds(log_odds(thetas[0]) + d1) - thetas[0]
        x2 = from_log_odds(log_odds(thetas[1]) + d2) - thetas[1]
        pe = base_e + ce[0] * x1 + ce[1] * x2
        pze = base_ze + cze[0] * x1 + cze[1] * x2
        return pze / pe if pe > 0 else math.nan

    def on_surface(d1):
        lo, hi = -25.0, 25.0
        f_lo, f_hi = post(d1, lo) - p, post(d1, hi) - p
        if math.isnan(f_lo) or math.isnan(f_hi) or f_lo * f_hi > 0:
            return None
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if (post(d1, mid) - p) * f_lo <= 0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    best = math.inf
    for d1 in np.linspace(-25, 25, n_grid):
        d2 = on_surface(float(d1))
        if d2 is not None:
            best = min(best, max(abs(d1), abs(d2)))
    return best


def enum_family_coefficients(net, evidence, var) -> np.ndarray:
    """Multilinear coefficients of one CPT's cells in Pr(evidence), shape
    (n_instantiations, n_states), computed by world enumeration with the
    CPT's own factor left out of the products."""
    cols, n = world_columns(net)
    cpt = net.cpt(var)
    total = np.ones(n)
    for other in net.cpts:
        if other.variable.name == var:
            continue
        sel = tuple(cols[p.name] for p in other.parents) + (cols[other.variable.name],)
        total = total * other.table[sel]
    mask = np.ones(n, dtype=bool)
    for name, state in evidence.items():
        mask &= cols[name] == net.variable(name).index_of(state)
    out = np.zeros((cpt.n_instantiations, cpt.variable.n_states))
    if cpt.parents:
        cards = tuple(p.n_states for p in cpt.parents)
        u_index = np.ravel_multi_index(tuple(cols[p.name] for p in cpt.parents), cards)
    else:
        u_index = np.zeros(n, dtype=int)
    x_index = cols[var]
    np.add.at(out, (u_index[mask], x_index[mask]), total[mask])
    return out
