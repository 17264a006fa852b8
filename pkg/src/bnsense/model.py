"""Discrete Bayesian networks with addressable, lockable CPT parameters.

Networks are immutable values: every mutating operation returns a new
network and leaves the original untouched, so instances can be shared
freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

# Evidence: variable name -> observed state label.
Evidence = Mapping[str, str]

ROW_SUM_TOL = 1e-9


class ModelError(ValueError):
    """Base class for model-level errors."""


class LockedParameterError(ModelError):
    pass


class OutOfRangeError(ModelError):
    pass


class MultiValuedTargetError(ModelError):
    """Raised when a binary-only operation is pointed at a multi-valued variable."""


class UnknownTargetError(ModelError):
    """Raised when a reference does not resolve to a table cell."""


@dataclass(frozen=True)
class Variable:
    """A discrete variable with an ordered list of state labels."""

    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def n_states(self) -> int:
        return len(self.values)

    @property
    def is_binary(self) -> bool:
        return len(self.values) == 2

    def index_of(self, state: str) -> int:
        try:
            return self.values.index(state)
        except ValueError:
            raise UnknownTargetError(
                f"variable {self.name!r} has no state {state!r} (states: {', '.join(self.values)})"
            ) from None


@dataclass(frozen=True)
class ParameterRef:
    """Address of one CPT cell: P(variable=state | parent_states).

    parent_states is a tuple of (parent name, state) pairs in the CPT's
    declared parent order; use Cpt.ref or BayesianNetwork.param to build
    one in canonical order from a mapping.
    """

    variable: str
    state: str
    parent_states: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "parent_states", tuple((str(p), str(s)) for p, s in self.parent_states)
        )

    def describe(self) -> str:
        if not self.parent_states:
            return f"P({self.variable}={self.state})"
        cond = ", ".join(f"{p}={s}" for p, s in self.parent_states)
        return f"P({self.variable}={self.state} | {cond})"


@dataclass(frozen=True)
class ParameterDelta:
    """An additive change to one CPT cell (the row complement co-varies)."""

    target: ParameterRef
    delta: float


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table for one variable.

    The table has shape (*parent cardinalities, n_states); flattening the
    parent axes in C order yields the canonical parent-instantiation index,
    with the first listed parent most significant and states enumerated in
    declared order.
    """

    variable: Variable
    parents: tuple[Variable, ...]
    table: np.ndarray
    locks: frozenset[ParameterRef] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        expected = self.parent_cards + (self.variable.n_states,)
        table = np.array(self.table, dtype=np.float64).reshape(expected)
        table.flags.writeable = False
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "locks", frozenset(self.canonical(r) for r in self.locks))

    @property
    def parent_cards(self) -> tuple[int, ...]:
        return tuple(p.n_states for p in self.parents)

    @property
    def n_instantiations(self) -> int:
        return int(np.prod(self.parent_cards, dtype=np.int64)) if self.parents else 1

    @property
    def rows(self) -> np.ndarray:
        """Table reshaped to (n_instantiations, n_states)."""
        return self.table.reshape(self.n_instantiations, self.variable.n_states)

    def instantiation(self, index: int) -> tuple[tuple[str, str], ...]:
        """Parent assignment for a canonical instantiation index."""
        if not (0 <= index < self.n_instantiations):
            raise UnknownTargetError(
                f"instantiation index {index} out of range for CPT of {self.variable.name!r}"
            )
        if not self.parents:
            return ()
        multi = np.unravel_index(index, self.parent_cards)
        return tuple((p.name, p.values[int(i)]) for p, i in zip(self.parents, multi))

    def instantiation_index(self, parent_states: Mapping[str, str] | Iterable[tuple[str, str]]) -> int:
        assignment = dict(parent_states.items() if isinstance(parent_states, Mapping) else parent_states)
        if set(assignment) != {p.name for p in self.parents}:
            raise UnknownTargetError(
                f"CPT of {self.variable.name!r} expects an assignment to parents "
                f"{[p.name for p in self.parents]}, got {sorted(assignment)}"
            )
        if not self.parents:
            return 0
        multi = tuple(p.index_of(assignment[p.name]) for p in self.parents)
        return int(np.ravel_multi_index(multi, self.parent_cards))

    def ref(self, state: str, parent_states: Mapping[str, str] | Iterable[tuple[str, str]] = ()) -> ParameterRef:
        """Build a canonical ParameterRef into this table."""
        assignment = dict(parent_states.items() if isinstance(parent_states, Mapping) else parent_states)
        index = self.instantiation_index(assignment)
        self.variable.index_of(state)
        return ParameterRef(self.variable.name, state, self.instantiation(index))

    def canonical(self, ref: ParameterRef) -> ParameterRef:
        if ref.variable != self.variable.name:
            raise UnknownTargetError(f"{ref.describe()} does not address the CPT of {self.variable.name!r}")
        return self.ref(ref.state, ref.parent_states)

    def cell(self, ref: ParameterRef) -> tuple[int, int]:
        """(instantiation index, state index) for a reference into this table."""
        ref = self.canonical(ref)
        return self.instantiation_index(ref.parent_states), self.variable.index_of(ref.state)

    def value(self, ref: ParameterRef) -> float:
        u, x = self.cell(ref)
        return float(self.rows[u, x])

    def refs(self) -> Iterator[ParameterRef]:
        """All cell references in canonical order (instantiation-major)."""
        for u in range(self.n_instantiations):
            inst = self.instantiation(u)
            for state in self.variable.values:
                yield ParameterRef(self.variable.name, state, inst)

    def is_locked(self, ref: ParameterRef) -> bool:
        return self.canonical(ref) in self.locks


@dataclass(frozen=True, eq=False)
class BayesianNetwork:
    """A DAG of discrete variables, one CPT per variable."""

    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))

    @cached_property
    def _var_by_name(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @cached_property
    def _cpt_by_name(self) -> dict[str, Cpt]:
        return {c.variable.name: c for c in self.cpts}

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v.name: [] for v in self.variables}
        for c in self.cpts:
            for p in c.parents:
                if p.name in out:
                    out[p.name].append(c.variable.name)
        return {k: tuple(v) for k, v in out.items()}

    def variable(self, name: str) -> Variable:
        try:
            return self._var_by_name[name]
        except KeyError:
            raise UnknownTargetError(f"unknown variable {name!r}") from None

    def cpt(self, name: str) -> Cpt:
        self.variable(name)
        try:
            return self._cpt_by_name[name]
        except KeyError:
            raise UnknownTargetError(f"variable {name!r} has no CPT") from None

    def family(self, name: str) -> tuple[str, ...]:
        cpt = self.cpt(name)
        return (name,) + tuple(p.name for p in cpt.parents)

    def param(self, variable: str, state: str, parent_states: Mapping[str, str] | None = None) -> ParameterRef:
        return self.cpt(variable).ref(state, parent_states or {})

    def theta(self, ref: ParameterRef) -> float:
        return self.cpt(ref.variable).value(ref)

    def complement_ref(self, ref: ParameterRef) -> ParameterRef:
        """The other-state cell of the same row (binary variables only)."""
        var = self.variable(ref.variable)
        if not var.is_binary:
            raise MultiValuedTargetError(
                f"variable {var.name!r} has {var.n_states} states; row complements are defined for binary variables"
            )
        other = var.values[1 - var.index_of(ref.state)]
        return self.cpt(var.name).ref(other, ref.parent_states)

    def with_cpt(self, name: str, table: np.ndarray | None = None, locks: frozenset[ParameterRef] | None = None) -> "BayesianNetwork":
        old = self.cpt(name)
        new = Cpt(
            old.variable,
            old.parents,
            old.table if table is None else table,
            old.locks if locks is None else frozenset(locks),
        )
        return BayesianNetwork(self.variables, tuple(new if c is old else c for c in self.cpts))

    def validate_evidence(self, evidence: Evidence) -> None:
        for name, state in evidence.items():
            self.variable(name).index_of(state)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


def validate_network(net: BayesianNetwork) -> list[Violation]:
    """Check every structural invariant; an empty list means the network is valid."""
    out: list[Violation] = []
    seen = set()
    for v in net.variables:
        if v.name in seen:
            out.append(Violation("duplicate-variable", f"variable {v.name!r} declared more than once"))
        seen.add(v.name)
        if v.n_states < 2:
            out.append(Violation("too-few-states", f"variable {v.name!r} has {v.n_states} state(s); need at least 2"))
        if len(set(v.values)) != v.n_states:
            out.append(Violation("duplicate-state", f"variable {v.name!r} repeats a state label"))

    by_var: dict[str, list[Cpt]] = {}
    for c in net.cpts:
        by_var.setdefault(c.variable.name, []).append(c)
    for v in net.variables:
        n = len(by_var.get(v.name, []))
        if n == 0:
            out.append(Violation("missing-cpt", f"variable {v.name!r} has no CPT"))
        elif n > 1:
            out.append(Violation("duplicate-cpt", f"variable {v.name!r} has {n} CPTs"))
    for name in by_var:
        if name not in net._var_by_name:
            out.append(Violation("unknown-variable", f"CPT declared for undeclared variable {name!r}"))

    # Edges from parent lists; cycle check by iterated leaf removal.
    edges: dict[str, set[str]] = {v.name: set() for v in net.variables}
    for c in net.cpts:
        names = [p.name for p in c.parents]
        if len(set(names)) != len(names):
            out.append(Violation("duplicate-parent", f"CPT of {c.variable.name!r} lists a parent twice"))
        for p in c.parents:
            if p.name not in net._var_by_name:
                out.append(Violation("unknown-parent", f"CPT of {c.variable.name!r} has undeclared parent {p.name!r}"))
            elif c.variable.name in edges:
                edges[c.variable.name].add(p.name)
    remaining = dict(edges)
    while True:
        roots = [n for n, ps in remaining.items() if not ps]
        if not roots:
            break
        for r in roots:
            del remaining[r]
        for ps in remaining.values():
            ps.difference_update(roots)
    if remaining:
        cyc = ", ".join(sorted(remaining))
        out.append(Violation("cycle", f"parent lists induce a cycle among: {cyc}"))

    for c in net.cpts:
        rows = c.rows
        if np.any(rows < 0) or np.any(rows > 1):
            bad = np.argwhere((rows < 0) | (rows > 1))[0]
            out.append(Violation(
                "out-of-range",
                f"CPT of {c.variable.name!r} has entry {rows[bad[0], bad[1]]} outside [0,1] "
                f"at instantiation {bad[0]}, state {c.variable.values[bad[1]]}",
            ))
        sums = rows.sum(axis=1)
        for u in np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]:
            inst = ", ".join(f"{p}={s}" for p, s in c.instantiation(int(u))) or "(no parents)"
            out.append(Violation(
                "row-sum",
                f"CPT of {c.variable.name!r}, instantiation {inst}: row sums to {sums[u]:.12g}, expected 1",
            ))
        for ref in sorted(c.locks, key=lambda r: (r.variable, r.parent_states, r.state)):
            try:
                c.cell(ref)
            except ModelError as exc:
                out.append(Violation("bad-lock", str(exc)))
    return out


def apply_delta(net: BayesianNetwork, change: ParameterDelta) -> BayesianNetwork:
    """Apply an additive change to one binary-row cell, co-varying its complement.

    The targeted variable must be binary, neither the cell nor its
    complement may be locked, and both resulting entries must stay in [0,1].
    """
    ref = change.target
    var = net.variable(ref.variable)
    if not var.is_binary:
        raise MultiValuedTargetError(
            f"cannot change {ref.describe()}: {var.name!r} has {var.n_states} states and "
            "proportional co-variation for multi-valued variables is not supported"
        )
    cpt = net.cpt(ref.variable)
    comp = net.complement_ref(ref)
    if cpt.is_locked(ref):
        raise LockedParameterError(f"{ref.describe()} is locked")
    if cpt.is_locked(comp):
        raise LockedParameterError(f"co-varying complement {comp.describe()} is locked")
    u, x = cpt.cell(ref)
    rows = cpt.rows.copy()
    new_theta = rows[u, x] + change.delta
    new_comp = rows[u, 1 - x] - change.delta
    if not (-1e-12 <= new_theta <= 1 + 1e-12) or not (-1e-12 <= new_comp <= 1 + 1e-12):
        raise OutOfRangeError(
            f"{ref.describe()}: {rows[u, x]:.6g} + {change.delta:.6g} leaves [0,1]"
        )
    rows[u, x] = min(max(new_theta, 0.0), 1.0)
    rows[u, 1 - x] = min(max(new_comp, 0.0), 1.0)
    return net.with_cpt(ref.variable, rows.reshape(cpt.table.shape))


def apply_deltas(net: BayesianNetwork, deltas: Iterable[ParameterDelta]) -> BayesianNetwork:
    for d in deltas:
        net = apply_delta(net, d)
    return net


def log_odds(theta: float) -> float:
    """ln(theta / (1 - theta)); -inf at 0 and +inf at 1."""
    if not (0.0 <= theta <= 1.0):
        raise OutOfRangeError(f"log-odds argument {theta} outside [0,1]")
    if theta == 0.0:
        return -math.inf
    if theta == 1.0:
        return math.inf
    return math.log(theta / (1.0 - theta))


def from_log_odds(t: float) -> float:
    """Inverse of log_odds, numerically stable for large |t|."""
    if t == math.inf:
        return 1.0
    if t == -math.inf:
        return 0.0
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def is_extreme(theta: float) -> bool:
    """Parameters at exactly 0 or 1 are immovable under log-odds changes."""
    return theta == 0.0 or theta == 1.0
