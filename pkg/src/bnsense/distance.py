"""Distribution distance for CPT changes, and the query-change bounds it induces.

The measure for a whole-distribution change is the log of the largest
world-probability ratio minus the log of the smallest.  For a change
confined to one CPT it collapses to the largest absolute log-odds change
over that table's rows, and for changes to two CPTs with disjoint families
it is additive.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .engine import NetworkTooLargeError, joint_probability
from .model import (
    BayesianNetwork,
    ModelError,
    MultiValuedTargetError,
    ParameterDelta,
    log_odds,
)

PARENT_PROB_TOL = 1e-12
WORLD_LIMIT = 2**22


class StructureMismatchError(ModelError):
    pass


class OverlappingFamiliesError(ModelError):
    """Distance across CPTs whose families share a variable is not additive
    and is not supported; changes must target variables with no parent-child
    relation and no common parent."""


def families_disjoint(net: BayesianNetwork, x_var: str, y_var: str) -> bool:
    return not set(net.family(x_var)) & set(net.family(y_var))


def _require_disjoint(net: BayesianNetwork, x_var: str, y_var: str) -> None:
    if not families_disjoint(net, x_var, y_var):
        shared = sorted(set(net.family(x_var)) & set(net.family(y_var)))
        raise OverlappingFamiliesError(
            f"families of {x_var!r} and {y_var!r} overlap (shared: {', '.join(shared)}); "
            "distances only add for disjoint families, and the table-product "
            "procedure needed for overlapping ones is not supported"
        )


def cpt_distance(net: BayesianNetwork, x_var: str, deltas: Iterable[ParameterDelta]) -> float:
    """Largest absolute log-odds change over the rows of one binary CPT.

    Rows whose parent instantiation has probability <= 1e-12 under `net`
    cannot influence any query and are left out.  A delta that lands a
    previously interior parameter exactly on 0 or 1 yields +inf.
    """
    var = net.variable(x_var)
    if not var.is_binary:
        raise MultiValuedTargetError(f"CPT distance is defined for binary variables; {x_var!r} is not")
    cpt = net.cpt(x_var)
    seen_rows: set[int] = set()
    worst = 0.0
    for d in deltas:
        if d.target.variable != x_var:
            raise ModelError(f"{d.target.describe()} does not belong to the CPT of {x_var!r}")
        u, x = cpt.cell(d.target)
        if u in seen_rows:
            raise ModelError(
                f"two deltas target the same row of {x_var!r} (instantiation {u}); "
                "a row moves as one co-varied unit"
            )
        seen_rows.add(u)
        if d.delta == 0.0:
            continue
        theta = float(cpt.rows[u, x])
        new = theta + d.delta
        if not (-1e-12 <= new <= 1 + 1e-12):
            raise ModelError(f"{d.target.describe()}: delta {d.delta:.6g} leaves [0,1]")
        parent_event = dict(cpt.instantiation(u))
        if parent_event and joint_probability(net, parent_event) <= PARENT_PROB_TOL:
            continue
        worst = max(worst, abs(log_odds(min(max(new, 0.0), 1.0)) - log_odds(theta)))
    return worst


def combined_distance(net: BayesianNetwork, deltas: Iterable[ParameterDelta]) -> float:
    """Total distance for a change spanning one or two CPTs with disjoint families."""
    by_var: dict[str, list[ParameterDelta]] = {}
    for d in deltas:
        by_var.setdefault(d.target.variable, []).append(d)
    names = sorted(by_var)
    if len(names) > 2:
        raise ModelError(f"changes span {len(names)} CPTs; at most two are supported")
    if len(names) == 2:
        _require_disjoint(net, names[0], names[1])
    return sum(cpt_distance(net, name, by_var[name]) for name in names)


def _world_products(net: BayesianNetwork) -> np.ndarray:
    cards = [v.n_states for v in net.variables]
    n = math.prod(cards)
    if n > WORLD_LIMIT:
        raise NetworkTooLargeError(f"{n} worlds exceed the enumeration limit of {WORLD_LIMIT}")
    cols = dict(zip((v.name for v in net.variables), np.unravel_index(np.arange(n), cards)))
    out = np.ones(n)
    for cpt in net.cpts:
        sel = tuple(cols[p.name] for p in cpt.parents) + (cols[cpt.variable.name],)
        out = out * cpt.table[sel]
    return out


def global_distance_brute(net_before: BayesianNetwork, net_after: BayesianNetwork) -> float:
    """Enumeration oracle for the whole-distribution distance.

    Worlds where both distributions put zero mass are treated as ratio 1;
    a world losing all its mass (or gaining mass from nothing) makes the
    distance infinite.
    """
    vars_before = [(v.name, v.values) for v in net_before.variables]
    vars_after = [(v.name, v.values) for v in net_after.variables]
    parents_before = [tuple(p.name for p in c.parents) for c in net_before.cpts]
    parents_after = [tuple(p.name for p in c.parents) for c in net_after.cpts]
    if vars_before != vars_after or parents_before != parents_after:
        raise StructureMismatchError("networks differ in variables, states, or parent lists")
    before = _world_products(net_before)
    after = _world_products(net_after)
    both_zero = (before == 0.0) & (after == 0.0)
    keep_before = before[~both_zero]
    keep_after = after[~both_zero]
    if keep_before.size == 0:
        return 0.0
    with np.errstate(divide="ignore"):
        ratios = keep_before / keep_after  # after==0 with before>0 -> +inf
    hi = float(np.max(ratios))
    lo = float(np.min(ratios))
    if lo == 0.0 or math.isinf(hi):
        return math.inf
    return math.log(hi) - math.log(lo)


def query_bounds(p: float, d: float) -> tuple[float, float]:
    """Range any conditional query starting at p can reach after a change of distance d."""
    if not (0.0 <= p <= 1.0):
        raise ModelError(f"query value {p} outside [0,1]")
    if d < 0.0 or math.isnan(d):
        raise ModelError(f"distance {d} must be nonnegative")
    if p == 0.0 or p == 1.0:
        return (p, p)
    if math.isinf(d):
        return (0.0, 1.0)
    try:
        ed = math.exp(d)
    except OverflowError:
        ed = math.inf
    lower = p / (p + (1.0 - p) * ed)
    upper = p / (p + (1.0 - p) * math.exp(-d))
    return (lower, upper)


def bound_curve(d: float, n_points: int = 101) -> list[tuple[float, float, float]]:
    """Sampled (p, lower, upper) rows of the bound envelope, for plotting."""
    rows = []
    for i in range(n_points):
        p = i / (n_points - 1)
        lo, hi = query_bounds(p, d)
        rows.append((p, lo, hi))
    return rows
