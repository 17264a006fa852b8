"""Exact inference and co-varied derivatives of joint probabilities.

Everything here is a pure function of immutable inputs.  The core is a
small variable-elimination pass over numpy factors; derivative tables are
read off marginals computed with the differentiated CPT's factor removed,
which keeps them exact even for parameters at 0 or 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import (
    BayesianNetwork,
    Evidence,
    MultiValuedTargetError,
    ParameterRef,
)

BRUTE_FORCE_WORLD_LIMIT = 2**22


class EngineError(ValueError):
    pass


class ZeroEvidenceError(EngineError):
    """Conditioning on evidence with probability zero."""


class NetworkTooLargeError(EngineError):
    pass


@dataclass(frozen=True)
class DerivativeTable:
    """Co-varied first derivatives of Pr(evidence) per CPT cell.

    entries[theta_{x|u}] is d Pr(e) / d theta_{x|u} under the binary
    co-variation theta_{xbar|u} = 1 - theta_{x|u}.
    """

    evidence: tuple[tuple[str, str], ...]
    entries: Mapping[ParameterRef, float]


@dataclass(frozen=True)
class SecondDerivativeTable:
    """Co-varied second derivatives across two distinct CPTs."""

    evidence: tuple[tuple[str, str], ...]
    cpt_pair: tuple[str, str]
    entries: Mapping[tuple[ParameterRef, ParameterRef], float]


@dataclass
class _Factor:
    vars: tuple[str, ...]
    values: np.ndarray


def _restricted_factors(net: BayesianNetwork, evidence: Evidence, exclude: frozenset[str]) -> list[_Factor]:
    net.validate_evidence(evidence)
    out = []
    for cpt in net.cpts:
        if cpt.variable.name in exclude:
            continue
        names = tuple(p.name for p in cpt.parents) + (cpt.variable.name,)
        values = cpt.table
        for axis in reversed(range(len(names))):
            name = names[axis]
            if name in evidence:
                idx = net.variable(name).index_of(evidence[name])
                values = np.take(values, idx, axis=axis)
        kept = tuple(n for n in names if n not in evidence)
        out.append(_Factor(kept, values))
    return out


def _elimination_order(scopes: list[set[str]], to_eliminate: set[str]) -> list[str]:
    """Min-fill ordering with deterministic tie-breaking (fill, degree, name)."""
    adj: dict[str, set[str]] = {v: set() for s in scopes for v in s}
    for s in scopes:
        for v in s:
            adj[v].update(s - {v})
    order = []
    pending = set(to_eliminate)
    while pending:
        best = None
        for v in sorted(pending):
            nbrs = adj[v] & set(adj)
            fill = sum(
                1
                for a in nbrs
                for b in nbrs
                if a < b and b not in adj[a]
            )
            key = (fill, len(nbrs), v)
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        nbrs = adj.pop(v)
        for a in nbrs:
            adj[a].discard(v)
            adj[a].update(nbrs - {a})
        pending.remove(v)
        order.append(v)
    return order


def _marginal(
    net: BayesianNetwork,
    evidence: Evidence,
    keep: Sequence[str],
    exclude: Iterable[str] = (),
) -> np.ndarray:
    """Sum-of-products over worlds consistent with `evidence`, as a table over `keep`.

    CPT factors of `exclude` variables are omitted from the products, which
    yields the multilinear coefficients of those tables.  Observed `keep`
    variables come back one-hot; `keep` variables mentioned by no remaining
    factor come back constant along their axis.
    """
    exclude = frozenset(exclude)
    factors = _restricted_factors(net, evidence, exclude)
    keep_free = [k for k in keep if k not in evidence]
    in_scope = {v for f in factors for v in f.vars}
    ids = {v.name: i for i, v in enumerate(net.variables)}
    order = _elimination_order([set(f.vars) for f in factors], in_scope - set(keep_free))

    for v in order:
        group = [f for f in factors if v in f.vars]
        factors = [f for f in factors if v not in f.vars]
        out_vars = tuple(dict.fromkeys(w for f in group for w in f.vars if w != v))
        operands = []
        for f in group:
            operands.extend([f.values, [ids[w] for w in f.vars]])
        operands.append([ids[w] for w in out_vars])
        factors.append(_Factor(out_vars, np.einsum(*operands)))

    # Combine what is left into a single table over (a subset of) keep_free.
    result_vars = tuple(dict.fromkeys(w for f in factors for w in f.vars))
    if factors:
        operands = []
        for f in factors:
            operands.extend([f.values, [ids[w] for w in f.vars]])
        operands.append([ids[w] for w in result_vars])
        values = np.einsum(*operands)
    else:
        values = np.float64(1.0)

    if not keep:
        return np.asarray(values, dtype=np.float64)

    # Expand to the full requested domain, in `keep` order: zero everywhere,
    # then write the evidence-consistent slice (broadcasting free axes).
    src_axes = {v: i for i, v in enumerate(result_vars)}
    padded = np.reshape(values, np.shape(values) + (1,) * (len(keep) - len(result_vars)))
    fresh = iter(range(len(result_vars), len(keep)))
    perm = [src_axes[k] if k in src_axes else next(fresh) for k in keep]
    aligned = np.transpose(padded, perm)

    shape = tuple(net.variable(k).n_states for k in keep)
    out = np.zeros(shape)
    idx = tuple(
        net.variable(k).index_of(evidence[k]) if (k in evidence and k not in src_axes) else slice(None)
        for k in keep
    )
    src = aligned[tuple(0 if isinstance(i, int) else slice(None) for i in idx)]
    out[idx] = np.broadcast_to(src, out[idx].shape)
    return out


def joint_probability(net: BayesianNetwork, evidence: Evidence) -> float:
    """Pr(evidence) by exact variable elimination."""
    return float(_marginal(net, evidence, ()))


def _merge_assignments(z: Evidence, e: Evidence) -> Evidence | None:
    """Union of two assignments, or None if they conflict."""
    merged = dict(e)
    for k, v in z.items():
        if merged.get(k, v) != v:
            return None
        merged[k] = v
    return merged


def posterior(net: BayesianNetwork, z: Evidence, e: Evidence) -> float:
    """Pr(z | e) = Pr(z, e) / Pr(e)."""
    pe = joint_probability(net, e)
    if pe <= 0.0:
        raise ZeroEvidenceError(f"evidence {dict(e)} has probability {pe}; posterior undefined")
    merged = _merge_assignments(z, e)
    if merged is None:
        return 0.0
    return joint_probability(net, merged) / pe


def family_gradient(net: BayesianNetwork, evidence: Evidence, variable: str) -> np.ndarray:
    """Raw partials of Pr(evidence) w.r.t. every cell of one CPT.

    Returned with the CPT's own table layout (*parent cards, n_states).
    Exact for extreme parameter values: the differentiated factor is left
    out of the products entirely, matching the two-point probe
    Pr(e)|cell=1 - Pr(e)|cell=0 by multilinearity.
    """
    cpt = net.cpt(variable)
    keep = tuple(p.name for p in cpt.parents) + (variable,)
    return _marginal(net, evidence, keep, exclude={variable})


def raw_partial(net: BayesianNetwork, evidence: Evidence, param: ParameterRef) -> float:
    """d Pr(evidence) / d cell, holding every other cell (complement included) fixed."""
    cpt = net.cpt(param.variable)
    u, x = cpt.cell(param)
    grad = family_gradient(net, evidence, param.variable)
    return float(grad.reshape(cpt.n_instantiations, cpt.variable.n_states)[u, x])


def covaried_derivatives(
    net: BayesianNetwork, evidence: Evidence, cpts: Iterable[str]
) -> DerivativeTable:
    """First derivatives of Pr(evidence) under binary co-variation, per requested CPT.

    One elimination pass per CPT; entries cover every unlocked cell of each
    requested (necessarily binary) variable.
    """
    entries: dict[ParameterRef, float] = {}
    for name in cpts:
        var = net.variable(name)
        if not var.is_binary:
            raise MultiValuedTargetError(
                f"co-varied derivatives require binary variables; {name!r} has {var.n_states} states"
            )
        cpt = net.cpt(name)
        grad = family_gradient(net, evidence, name).reshape(cpt.n_instantiations, 2)
        for ref in cpt.refs():
            if ref in cpt.locks:
                continue
            u, x = cpt.cell(ref)
            entries[ref] = float(grad[u, x] - grad[u, 1 - x])
    return DerivativeTable(tuple(sorted(evidence.items())), entries)


def second_covaried_derivatives(
    net: BayesianNetwork, evidence: Evidence, x_var: str, y_var: str
) -> SecondDerivativeTable:
    """Co-varied second derivatives of Pr(evidence) across the CPTs of two variables.

    Computed from the multilinear coefficient table obtained with both CPT
    factors removed, so values stay exact at extreme parameters.  Valid for
    overlapping families too (shared parents, parent-child pairs): cell
    pairs whose assignments conflict have coefficient zero.
    """
    if x_var == y_var:
        raise EngineError("second derivatives need two distinct variables")
    for name in (x_var, y_var):
        if not net.variable(name).is_binary:
            raise MultiValuedTargetError(
                f"co-varied second derivatives require binary variables; {name!r} is not"
            )
    x_cpt, y_cpt = net.cpt(x_var), net.cpt(y_var)
    keep = tuple(dict.fromkeys(net.family(x_var) + net.family(y_var)))
    table = _marginal(net, evidence, keep, exclude={x_var, y_var})
    axis = {v: i for i, v in enumerate(keep)}

    def raw(x_state: str, u: tuple, y_state: str, v: tuple) -> float:
        assign: dict[str, str] = {}
        for name, state in ((x_var, x_state), *u, (y_var, y_state), *v):
            if assign.get(name, state) != state:
                return 0.0
            assign[name] = state
        idx = [0] * len(keep)
        for name, state in assign.items():
            idx[axis[name]] = net.variable(name).index_of(state)
        return float(table[tuple(idx)])

    entries: dict[tuple[ParameterRef, ParameterRef], float] = {}
    xs, ys = x_cpt.variable.values, y_cpt.variable.values
    for ui in range(x_cpt.n_instantiations):
        u = x_cpt.instantiation(ui)
        for vi in range(y_cpt.n_instantiations):
            v = y_cpt.instantiation(vi)
            base = (
                raw(xs[0], u, ys[0], v)
                - raw(xs[1], u, ys[0], v)
                - raw(xs[0], u, ys[1], v)
                + raw(xs[1], u, ys[1], v)
            )
            for xi, x_state in enumerate(xs):
                for yi, y_state in enumerate(ys):
                    sign = (-1.0) ** (xi + yi)
                    entries[
                        (ParameterRef(x_var, x_state, u), ParameterRef(y_var, y_state, v))
                    ] = sign * base
    return SecondDerivativeTable(tuple(sorted(evidence.items())), (x_var, y_var), entries)


def brute_force_joint(net: BayesianNetwork, evidence: Evidence) -> float:
    """Reference semantics for joint_probability: enumerate worlds, sum products.

    Deliberately independent of the elimination machinery above.
    """
    net.validate_evidence(evidence)
    cards = [v.n_states for v in net.variables]
    n_worlds = math.prod(cards)
    if n_worlds > BRUTE_FORCE_WORLD_LIMIT:
        raise NetworkTooLargeError(
            f"{n_worlds} worlds exceed the enumeration limit of {BRUTE_FORCE_WORLD_LIMIT}"
        )
    columns = dict(zip((v.name for v in net.variables), np.unravel_index(np.arange(n_worlds), cards)))
    total = np.ones(n_worlds)
    for cpt in net.cpts:
        sel = tuple(columns[p.name] for p in cpt.parents) + (columns[cpt.variable.name],)
        total = total * cpt.table[sel]
    mask = np.ones(n_worlds, dtype=bool)
    for name, state in evidence.items():
        mask &= columns[name] == net.variable(name).index_of(state)
    return float(total[mask].sum())
