"""Solution spaces and minimum-disturbance parameter changes for query constraints.

A constraint Pr(z | e) >= p (or <= p) is linear in the co-varied parameters
of any one CPT and bilinear across two CPTs.  This module computes the
coefficients of those solution regions, solves for admissible single
parameter changes, and finds the change minimizing the log-odds distance:
within a CPT the optimum moves every useful row by the same absolute
log-odds amount, and across two CPTs a one-dimensional search over the
first CPT's movement reduces each step to the single-CPT problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

from .distance import cpt_distance, families_disjoint, OverlappingFamiliesError
from .engine import (
    ZeroEvidenceError,
    covaried_derivatives,
    joint_probability,
    posterior,
    second_covaried_derivatives,
)
from .model import (
    BayesianNetwork,
    Evidence,
    LockedParameterError,
    MultiValuedTargetError,
    ParameterDelta,
    ParameterRef,
    apply_deltas,
    from_log_odds,
    is_extreme,
    log_odds,
)

ALPHA_ZERO_TOL = 1e-14
BOUND_MARGIN = 1e-9          # movers stop this close to 0/1
CLAMP = 1e-12                # hard floor/ceiling for moved parameters
MAX_BISECTION_STEPS = 200
DEFAULT_QUERY_TOL = 1e-6
OUTER_GRID_POINTS = 64
OUTER_REFINE_TOL = 1e-4
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class SensitivityError(ValueError):
    pass


class InfeasibleError(SensitivityError):
    """No admissible change satisfies the constraint."""


class IrrelevantParameterError(InfeasibleError):
    """The parameter has a zero coefficient: no change to it can help."""


class NoCandidatesError(SensitivityError):
    """Every parameter of the CPT is locked, extreme, or has a zero coefficient."""


class ExtremeParameterError(SensitivityError):
    """Parameters at exactly 0 or 1 have infinite log-odds and are not moved."""


@dataclass(frozen=True)
class QueryConstraint:
    """Target condition Pr(target | evidence) {>=,<=} threshold."""

    target: Mapping[str, str]
    evidence: Mapping[str, str]
    direction: Literal["at_least", "at_most"]
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "target", dict(self.target))
        object.__setattr__(self, "evidence", dict(self.evidence))
        if self.direction not in ("at_least", "at_most"):
            raise SensitivityError(f"direction must be at_least or at_most, got {self.direction!r}")
        if not (0.0 < self.threshold < 1.0):
            raise SensitivityError(f"threshold must lie strictly inside (0,1), got {self.threshold}")
        overlap = set(self.target) & set(self.evidence)
        if overlap:
            raise SensitivityError(f"target and evidence both assign: {sorted(overlap)}")
        if not self.target:
            raise SensitivityError("constraint needs a target event")

    @property
    def sign(self) -> float:
        """+1 for at_least, -1 for at_most; scales the normalized inequality."""
        return 1.0 if self.direction == "at_least" else -1.0

    def satisfied(self, value: float, tol: float = 0.0) -> bool:
        if self.direction == "at_least":
            return value >= self.threshold - tol
        return value <= self.threshold + tol

    def describe(self) -> str:
        t = ", ".join(f"{k}={v}" for k, v in self.target.items())
        e = ", ".join(f"{k}={v}" for k, v in self.evidence.items())
        op = ">=" if self.direction == "at_least" else "<="
        cond = f" | {e}" if e else ""
        return f"Pr({t}{cond}) {op} {self.threshold:g}"


@dataclass(frozen=True)
class AlphaReport:
    """Coefficients of the normalized solution inequality sum(alpha * delta)
    (+ sum(cross * delta * delta)) >= rhs.

    Locked rows and rows at 0/1 are left out; cells with a zero coefficient
    stay in `alphas` but are listed in `inert`.  rhs <= 0 means the
    constraint already holds.
    """

    constraint: QueryConstraint
    variables: tuple[str, ...]
    alphas: dict[ParameterRef, float]
    rhs: float
    cross_alphas: dict[tuple[ParameterRef, ParameterRef], float] | None = None
    inert: frozenset[ParameterRef] = frozenset()

    @property
    def already_satisfied(self) -> bool:
        return self.rhs <= 0.0


@dataclass(frozen=True)
class ParameterSolution:
    """Admissible new values for one parameter, all other parameters held."""

    param: ParameterRef
    current: float
    feasible: bool
    interval: tuple[float, float] | None
    suggested: float | None
    distance: float | None


@dataclass(frozen=True)
class Suggestion:
    """A concrete co-varied change with its verified outcome."""

    deltas: tuple[ParameterDelta, ...]
    achieved_query: float
    distance: float
    feasible: bool


@dataclass
class _Row:
    ref: ParameterRef       # first-state cell; the complement mirrors it
    theta: float
    dze: float              # co-varied d Pr(z,e) / d theta
    de: float               # co-varied d Pr(e) / d theta
    alpha: float            # normalized coefficient
    movable: bool

    @property
    def useful(self) -> bool:
        return self.movable and abs(self.alpha) > ALPHA_ZERO_TOL


@dataclass
class _CptModel:
    """Exact linear response of (Pr(z,e), Pr(e)) to one CPT's co-varied deltas."""

    var: str
    rows: list[_Row]
    pze: float
    pe: float
    constraint: QueryConstraint

    @property
    def rhs(self) -> float:
        c = self.constraint
        return c.sign * (c.threshold * self.pe - self.pze)

    def response(self, deltas: Sequence[float]) -> tuple[float, float]:
        pze = self.pze + sum(r.dze * d for r, d in zip(self.rows, deltas))
        pe = self.pe + sum(r.de * d for r, d in zip(self.rows, deltas))
        return pze, pe

    def posterior_at(self, deltas: Sequence[float]) -> float:
        pze, pe = self.response(deltas)
        if pe <= 0.0:
            raise ZeroEvidenceError("proposed change drives the evidence probability to zero")
        return pze / pe

    def gap(self, deltas: Sequence[float]) -> float:
        """sum(alpha * delta) - rhs; nonnegative iff the constraint holds after the change."""
        return sum(r.alpha * d for r, d in zip(self.rows, deltas)) - self.rhs


def _evidence_for_joint(constraint: QueryConstraint) -> Evidence:
    merged = dict(constraint.evidence)
    merged.update(constraint.target)  # disjointness guaranteed by the constraint
    return merged


def _cpt_model(net: BayesianNetwork, constraint: QueryConstraint, x_var: str) -> _CptModel:
    var = net.variable(x_var)
    if not var.is_binary:
        raise MultiValuedTargetError(
            f"suggestion targets must be binary; {x_var!r} has {var.n_states} states"
        )
    pe = joint_probability(net, constraint.evidence)
    if pe <= 0.0:
        raise ZeroEvidenceError(
            f"evidence {dict(constraint.evidence)} has probability {pe}; constraint analysis undefined"
        )
    ze = _evidence_for_joint(constraint)
    pze = joint_probability(net, ze)
    d_e = covaried_derivatives(net, constraint.evidence, [x_var]).entries
    d_ze = covaried_derivatives(net, ze, [x_var]).entries
    cpt = net.cpt(x_var)
    sign = constraint.sign
    p = constraint.threshold
    rows = []
    for u in range(cpt.n_instantiations):
        inst = cpt.instantiation(u)
        ref = ParameterRef(x_var, var.values[0], inst)
        comp = ParameterRef(x_var, var.values[1], inst)
        theta = float(cpt.rows[u, 0])
        unlocked = ref not in cpt.locks and comp not in cpt.locks
        movable = unlocked and not is_extreme(theta)
        dze = d_ze.get(ref, 0.0)
        de = d_e.get(ref, 0.0)
        rows.append(_Row(ref, theta, dze, de, sign * (dze - p * de), movable))
    return _CptModel(x_var, rows, pze, pe, constraint)


def _report_from_model(model: _CptModel, net: BayesianNetwork) -> tuple[dict[ParameterRef, float], set[ParameterRef]]:
    alphas: dict[ParameterRef, float] = {}
    inert: set[ParameterRef] = set()
    for row in model.rows:
        if not row.movable:
            continue
        comp = net.complement_ref(row.ref)
        alphas[row.ref] = row.alpha
        alphas[comp] = -row.alpha
        if abs(row.alpha) <= ALPHA_ZERO_TOL:
            inert.update((row.ref, comp))
    return alphas, inert


def alpha_single_cpt(net: BayesianNetwork, constraint: QueryConstraint, x_var: str) -> AlphaReport:
    """Coefficients of the half-space of single-CPT changes enforcing the constraint."""
    model = _cpt_model(net, constraint, x_var)
    alphas, inert = _report_from_model(model, net)
    return AlphaReport(constraint, (x_var,), alphas, model.rhs, None, frozenset(inert))


def alpha_two_cpt(
    net: BayesianNetwork, constraint: QueryConstraint, x_var: str, y_var: str
) -> AlphaReport:
    """Coefficients (linear plus bilinear) for joint changes to two CPTs."""
    if x_var == y_var:
        raise SensitivityError("two-CPT analysis needs two distinct variables")
    mx = _cpt_model(net, constraint, x_var)
    my = _cpt_model(net, constraint, y_var)
    alphas_x, inert_x = _report_from_model(mx, net)
    alphas_y, inert_y = _report_from_model(my, net)
    d2_e = second_covaried_derivatives(net, constraint.evidence, x_var, y_var).entries
    d2_ze = second_covaried_derivatives(net, _evidence_for_joint(constraint), x_var, y_var).entries
    sign, p = constraint.sign, constraint.threshold
    cross = {
        key: sign * (d2_ze[key] - p * d2_e[key])
        for key in d2_ze
        if key[0] in alphas_x and key[1] in alphas_y
    }
    return AlphaReport(
        constraint,
        (x_var, y_var),
        {**alphas_x, **alphas_y},
        mx.rhs,
        cross,
        frozenset(inert_x | inert_y),
    )


def solution_space_value(report: AlphaReport, deltas: Iterable[ParameterDelta]) -> float:
    """Left-hand side of the normalized inequality for a proposed delta vector."""
    deltas = list(deltas)
    total = 0.0
    for d in deltas:
        try:
            total += report.alphas[d.target] * d.delta
        except KeyError:
            raise SensitivityError(
                f"{d.target.describe()} is locked, extreme, or outside the report's CPTs"
            ) from None
    if report.cross_alphas is not None:
        x_var = report.variables[0]
        for dx in deltas:
            if dx.target.variable != x_var:
                continue
            for dy in deltas:
                if dy.target.variable == x_var:
                    continue
                total += report.cross_alphas[(dx.target, dy.target)] * dx.delta * dy.delta
    return total


def satisfies_solution_space(report: AlphaReport, deltas: Iterable[ParameterDelta]) -> bool:
    return solution_space_value(report, deltas) >= report.rhs


def solve_single_parameter(
    net: BayesianNetwork, constraint: QueryConstraint, param: ParameterRef
) -> ParameterSolution:
    """Admissible new values for one parameter with every other parameter held.

    The suggested value is the interval endpoint closest to the current
    value in log-odds (the current value itself when no change is needed).
    """
    cpt = net.cpt(param.variable)
    param = cpt.canonical(param)
    theta = cpt.value(param)
    if not net.variable(param.variable).is_binary:
        raise MultiValuedTargetError(f"{param.describe()} belongs to a multi-valued variable")
    if cpt.is_locked(param) or cpt.is_locked(net.complement_ref(param)):
        raise LockedParameterError(f"{param.describe()} is locked (or its row complement is)")
    if is_extreme(theta):
        raise ExtremeParameterError(f"{param.describe()} = {theta:g} cannot move in log-odds")

    model = _cpt_model(net, constraint, param.variable)
    u = cpt.cell(param)[0]
    row = model.rows[u]
    alpha = row.alpha if param == row.ref else -row.alpha
    rhs = model.rhs

    if abs(alpha) <= ALPHA_ZERO_TOL:
        if rhs > 0.0:
            raise IrrelevantParameterError(
                f"{param.describe()} has a zero coefficient; no change to it can enforce "
                f"{constraint.describe()}"
            )
        return ParameterSolution(param, theta, True, (0.0, 1.0), theta, 0.0)

    bound = rhs / alpha
    if alpha > 0.0:
        lo, hi = max(0.0, theta + bound), 1.0
    else:
        lo, hi = 0.0, min(1.0, theta + bound)
    if lo > hi:
        return ParameterSolution(param, theta, False, None, None, None)
    suggested = min(max(theta, lo), hi)
    dist = abs(log_odds(suggested) - log_odds(theta)) if suggested != theta else 0.0
    return ParameterSolution(param, theta, True, (lo, hi), suggested, dist)


def _move(theta: float, signed_logodds: float) -> float:
    moved = from_log_odds(log_odds(theta) + signed_logodds)
    return min(max(moved, CLAMP), 1.0 - CLAMP)


def _delta_caps(rows: Sequence[_Row]) -> float:
    """Largest log-odds step any candidate needs to get within BOUND_MARGIN of its bound."""
    caps = []
    for r in rows:
        if r.alpha > 0:
            caps.append(log_odds(1.0 - BOUND_MARGIN) - log_odds(r.theta))
        else:
            caps.append(log_odds(r.theta) - log_odds(BOUND_MARGIN))
    return max(caps)


def _equal_logodds_deltas(rows: Sequence[_Row], delta: float) -> list[float]:
    return [_move(r.theta, math.copysign(delta, r.alpha)) - r.theta for r in rows]


def _solve_cpt_model(
    model: _CptModel, eps_q: float, trace: list[tuple[float, float]] | None = None
) -> tuple[float, list[float]]:
    """Smallest common |log-odds| step whose equal-step change meets the constraint.

    Returns (step, per-candidate-row theta deltas).  The step response
    h(step) = sum(alpha * delta(step)) is nondecreasing because every row
    moves in its coefficient's direction, so bisection is sound: the kept
    endpoint always satisfies the constraint and its residual shrinks
    monotonically.  `trace`, when given, records per iteration the kept
    endpoint's (h - rhs, |query - threshold|) residuals.
    """
    candidates = [r for r in model.rows if r.useful]
    if model.rhs <= 0.0:
        return 0.0, [0.0] * len(candidates)
    if not candidates:
        raise NoCandidatesError(
            f"no movable parameter of {model.var!r} has a nonzero coefficient for "
            f"{model.constraint.describe()}"
        )
    rhs = model.rhs
    p = model.constraint.threshold

    def gap(step: float) -> float:
        return sum(r.alpha * d for r, d in zip(candidates, _equal_logodds_deltas(candidates, step))) - rhs

    hi = _delta_caps(candidates)
    if gap(hi) < 0.0:
        raise InfeasibleError(
            f"no change confined to the CPT of {model.var!r} can enforce {model.constraint.describe()}"
        )

    def posterior_of(step: float) -> float:
        full = _expand(model, candidates, _equal_logodds_deltas(candidates, step))
        return model.posterior_at(full)

    lo = 0.0
    for _ in range(MAX_BISECTION_STEPS):
        residual = abs(posterior_of(hi) - p)
        if trace is not None:
            trace.append((gap(hi), residual))
        if residual <= 0.5 * eps_q:
            break
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi, _equal_logodds_deltas(candidates, hi)


def _expand(model: _CptModel, candidates: Sequence[_Row], deltas: Sequence[float]) -> list[float]:
    by_ref = {r.ref: d for r, d in zip(candidates, deltas)}
    return [by_ref.get(r.ref, 0.0) for r in model.rows]


def _suggestion_from_moves(
    net: BayesianNetwork,
    constraint: QueryConstraint,
    moves: list[tuple[ParameterRef, float]],
    eps_q: float,
) -> Suggestion:
    deltas = tuple(ParameterDelta(ref, d) for ref, d in moves if d != 0.0)
    applied = apply_deltas(net, deltas)
    achieved = posterior(applied, constraint.target, constraint.evidence)
    by_var: dict[str, list[ParameterDelta]] = {}
    for d in deltas:
        by_var.setdefault(d.target.variable, []).append(d)
    dist = sum(cpt_distance(net, v, ds) for v, ds in by_var.items())
    return Suggestion(deltas, achieved, dist, constraint.satisfied(achieved, eps_q))


def optimal_single_cpt(
    net: BayesianNetwork,
    constraint: QueryConstraint,
    x_var: str,
    eps_q: float = DEFAULT_QUERY_TOL,
) -> Suggestion:
    """Minimum-distance change confined to one CPT.

    All rows with nonzero coefficients move by one common absolute log-odds
    step, each in its coefficient's direction; the step is bisected until
    the query lands on the threshold within eps_q.
    """
    model = _cpt_model(net, constraint, x_var)
    if model.rhs <= 0.0:
        return Suggestion((), model.pze / model.pe, 0.0, True)
    step, deltas = _solve_cpt_model(model, eps_q)
    candidates = [r for r in model.rows if r.useful]
    return _suggestion_from_moves(
        net, constraint, [(r.ref, d) for r, d in zip(candidates, deltas)], eps_q
    )


def optimal_two_cpt(
    net: BayesianNetwork,
    constraint: QueryConstraint,
    x_var: str,
    y_var: str,
    eps_q: float = DEFAULT_QUERY_TOL,
) -> Suggestion:
    """Minimum total distance over joint changes to two CPTs with disjoint families.

    Searches one dimension: for each candidate log-odds step of the first
    CPT, the rest is a single-CPT problem on the modified network.  A coarse
    grid guards against local minima; golden-section then refines the best
    bracket.  The objective is step_x + step_y, which equals the combined
    distance because disjoint-family distances add.
    """
    if x_var == y_var:
        raise SensitivityError("two-CPT optimization needs two distinct variables")
    if not families_disjoint(net, x_var, y_var):
        shared = sorted(set(net.family(x_var)) & set(net.family(y_var)))
        raise OverlappingFamiliesError(
            f"families of {x_var!r} and {y_var!r} overlap (shared: {', '.join(shared)}); "
            "their distances do not add and joint optimization is not supported"
        )
    model_x = _cpt_model(net, constraint, x_var)
    _cpt_model(net, constraint, y_var)  # validates y early (binary, evidence)
    if model_x.rhs <= 0.0:
        return Suggestion((), model_x.pze / model_x.pe, 0.0, True)
    x_rows = [r for r in model_x.rows if r.useful]

    def inner(step_x: float) -> tuple[float, list[tuple[ParameterRef, float]]] | None:
        """Total distance and moves when the X step is fixed; None if infeasible there."""
        x_deltas = _equal_logodds_deltas(x_rows, step_x) if step_x > 0.0 else [0.0] * len(x_rows)
        x_moves = [(r.ref, d) for r, d in zip(x_rows, x_deltas) if d != 0.0]
        try:
            shifted = apply_deltas(net, (ParameterDelta(ref, d) for ref, d in x_moves))
            model_y = _cpt_model(shifted, constraint, y_var)
            step_y, y_deltas = _solve_cpt_model(model_y, eps_q)
        except (InfeasibleError, NoCandidatesError, ZeroEvidenceError):
            return None
        y_candidates = [r for r in model_y.rows if r.useful]
        y_moves = [(r.ref, d) for r, d in zip(y_candidates, y_deltas) if d != 0.0]
        return step_x + step_y, x_moves + y_moves

    grid = {0.0}
    if x_rows:
        cap = _delta_caps(x_rows)
        grid.update(cap * i / (OUTER_GRID_POINTS - 1) for i in range(OUTER_GRID_POINTS))
        try:
            step_x_solo, _ = _solve_cpt_model(model_x, eps_q)
            grid.add(step_x_solo)
        except (InfeasibleError, NoCandidatesError):
            pass
    points = sorted(grid)
    evals = {s: inner(s) for s in points}
    feasible = [s for s in points if evals[s] is not None]
    if not feasible:
        raise InfeasibleError(
            f"no joint change to the CPTs of {x_var!r} and {y_var!r} can enforce {constraint.describe()}"
        )
    best = min(feasible, key=lambda s: evals[s][0])

    # Golden-section refinement inside the bracket around the best grid point.
    i = points.index(best)
    a = points[i - 1] if i > 0 else best
    b = points[i + 1] if i + 1 < len(points) else best
    cache: dict[float, float] = {s: (evals[s][0] if evals[s] else math.inf) for s in points}

    def objective(s: float) -> float:
        if s not in cache:
            r = inner(s)
            cache[s] = r[0] if r else math.inf
        return cache[s]

    while b - a > OUTER_REFINE_TOL:
        c = b - _INVPHI * (b - a)
        d = a + _INVPHI * (b - a)
        if objective(c) <= objective(d):
            b = d
        else:
            a = c
    refined = min(cache, key=lambda s: (cache[s], s))
    result = evals.get(refined) or inner(refined)
    return _suggestion_from_moves(net, constraint, result[1], eps_q)


def prune_candidate_cpts(
    net: BayesianNetwork, constraint: QueryConstraint
) -> list[tuple[str, float]]:
    """Rank binary CPTs by the largest |coefficient| of any movable row.

    CPTs whose coefficients all vanish cannot influence the constraint by
    co-varied changes and are dropped; multi-valued variables are skipped.
    """
    pe = joint_probability(net, constraint.evidence)
    if pe <= 0.0:
        raise ZeroEvidenceError(f"evidence {dict(constraint.evidence)} has probability {pe}")
    ranked = []
    for v in net.variables:
        if not v.is_binary:
            continue
        model = _cpt_model(net, constraint, v.name)
        strength = max((abs(r.alpha) for r in model.rows if r.movable), default=0.0)
        if strength > ALPHA_ZERO_TOL:
            ranked.append((v.name, strength))
    ranked.sort(key=lambda t: (-t[1], t[0]))
    return ranked
