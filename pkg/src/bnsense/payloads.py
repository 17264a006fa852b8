"""Plain-dict views of results, shared by the CLI's machine output and the HTTP service.

Field names and ordering are part of the external interface: payloads are
emitted in canonical CPT order (instantiation-major, declared state order)
so identical inputs always serialize identically.
"""

from __future__ import annotations

import math
from typing import Sequence

from .distance import bound_curve
from .model import BayesianNetwork, ParameterDelta, ParameterRef
from .sensitivity import AlphaReport, ParameterSolution, QueryConstraint, Suggestion
from .softev import SoftEvidenceResult

BOUNDARY_SAMPLES = 256


def _num(x: float) -> float | str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def param_payload(ref: ParameterRef) -> dict:
    return {
        "variable": ref.variable,
        "state": ref.state,
        "parents": {p: s for p, s in ref.parent_states},
    }


def delta_payload(net: BayesianNetwork, d: ParameterDelta) -> dict:
    current = net.theta(d.target)
    return {
        "param": param_payload(d.target),
        "delta": _num(d.delta),
        "old_value": _num(current),
        "new_value": _num(current + d.delta),
    }


def constraint_payload(c: QueryConstraint) -> dict:
    return {
        "target": dict(c.target),
        "evidence": dict(c.evidence),
        "direction": c.direction,
        "threshold": _num(c.threshold),
    }


def network_summary(net: BayesianNetwork) -> dict:
    cpts = []
    for cpt in net.cpts:
        rows = []
        for u in range(cpt.n_instantiations):
            inst = dict(cpt.instantiation(u))
            rows.append(
                {
                    "instantiation": inst,
                    "probabilities": [_num(v) for v in cpt.rows[u]],
                    "locked": [
                        s
                        for s in cpt.variable.values
                        if cpt.ref(s, inst) in cpt.locks
                    ],
                }
            )
        cpts.append(
            {
                "variable": cpt.variable.name,
                "parents": [p.name for p in cpt.parents],
                "states": list(cpt.variable.values),
                "rows": rows,
            }
        )
    edges = [
        [p.name, c.variable.name] for c in net.cpts for p in c.parents
    ]
    return {
        "variables": [
            {"name": v.name, "states": list(v.values)} for v in net.variables
        ],
        "cpts": cpts,
        "edges": edges,
    }


def _ordered_refs(
    net: BayesianNetwork, variables: Sequence[str], known: dict[ParameterRef, float]
) -> list[ParameterRef]:
    return [ref for name in variables for ref in net.cpt(name).refs() if ref in known]


def alpha_report_payload(net: BayesianNetwork, report: AlphaReport) -> dict:
    alphas = [
        {
            "param": param_payload(ref),
            "alpha": _num(report.alphas[ref]),
            "inert": ref in report.inert,
        }
        for ref in _ordered_refs(net, report.variables, report.alphas)
    ]
    out = {
        "constraint": constraint_payload(report.constraint),
        "variables": list(report.variables),
        "rhs": _num(report.rhs),
        "already_satisfied": report.already_satisfied,
        "alphas": alphas,
    }
    if report.cross_alphas is not None:
        x_var, y_var = report.variables
        cross = [
            {
                "param_x": param_payload(rx),
                "param_y": param_payload(ry),
                "alpha": _num(report.cross_alphas[(rx, ry)]),
            }
            for rx in _ordered_refs(net, (x_var,), report.alphas)
            for ry in _ordered_refs(net, (y_var,), report.alphas)
            if (rx, ry) in report.cross_alphas
        ]
        out["cross_alphas"] = cross
    return out


def suggestion_payload(net: BayesianNetwork, s: Suggestion) -> dict:
    return {
        "feasible": s.feasible,
        "achieved_query": _num(s.achieved_query),
        "distance": _num(s.distance),
        "deltas": [delta_payload(net, d) for d in s.deltas],
    }


def infeasible_payload(reason: str) -> dict:
    return {"feasible": False, "reason": reason}


def parameter_solution_payload(s: ParameterSolution) -> dict:
    return {
        "param": param_payload(s.param),
        "current": _num(s.current),
        "feasible": s.feasible,
        "interval": [_num(s.interval[0]), _num(s.interval[1])] if s.interval else None,
        "suggested": _num(s.suggested) if s.suggested is not None else None,
        "distance": _num(s.distance) if s.distance is not None else None,
    }


def relevance_payload(ranked: Sequence[tuple[str, float]]) -> dict:
    return {
        "ranking": [
            {"variable": name, "strength": _num(strength)} for name, strength in ranked
        ]
    }


def softev_payload(result: SoftEvidenceResult) -> dict:
    return {
        "sensors": [
            {
                "host": t.sensor.host,
                "node": t.sensor.node_name,
                "likelihood_ratio": _num(t.likelihood_ratio),
                "false_positive": _num(t.false_positive),
                "false_negative": _num(t.false_negative),
            }
            for t in result.sensors
        ],
        "distance": _num(result.total_distance),
        "achieved_query": _num(result.achieved_query),
    }


def bounds_payload(d: float, p: float | None = None, n_points: int = 101) -> dict:
    if p is not None:
        from .distance import query_bounds

        lo, hi = query_bounds(p, d)
        return {"d": _num(d), "p": _num(p), "lower": _num(lo), "upper": _num(hi)}
    return {
        "d": _num(d),
        "points": [[_num(p_), _num(lo), _num(hi)] for p_, lo, hi in bound_curve(d, n_points)],
    }


def solution_space_payload(
    net: BayesianNetwork, report: AlphaReport, n_samples: int = BOUNDARY_SAMPLES
) -> dict:
    """Report coefficients plus, when exactly two cells can move, a sampled
    boundary polyline of (delta_1, delta_2) pairs suitable for plotting."""
    out = alpha_report_payload(net, report)
    movers = [
        ref
        for ref in _ordered_refs(net, report.variables, report.alphas)
        if ref not in report.inert and _is_first_state(net, ref)
    ]
    if len(movers) != 2:
        out["boundary"] = None
        return out
    r1, r2 = movers
    a1, a2 = report.alphas[r1], report.alphas[r2]
    t1, t2 = net.theta(r1), net.theta(r2)
    cross = 0.0
    if report.cross_alphas is not None and (r1, r2) in report.cross_alphas:
        cross = report.cross_alphas[(r1, r2)]
    points = []
    for i in range(n_samples):
        d1 = -t1 + (i / (n_samples - 1)) * 1.0
        denom = a2 + cross * d1
        if abs(denom) < 1e-300:
            continue
        d2 = (report.rhs - a1 * d1) / denom
        if -t2 <= d2 <= 1.0 - t2:
            points.append([_num(d1), _num(d2)])
    out["boundary"] = {
        "param_1": param_payload(r1),
        "param_2": param_payload(r2),
        "points": points,
    }
    return out


def _is_first_state(net: BayesianNetwork, ref: ParameterRef) -> bool:
    return net.variable(ref.variable).values[0] == ref.state
