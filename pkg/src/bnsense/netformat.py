"""The canonical textual network format.

Grammar (line oriented; '#' starts a comment, blank lines are ignored):

    var NAME STATE STATE [STATE ...]
    cpt NAME [| PARENT [PARENT ...]]
        PROB ... PROB                        (root: exactly one row)
        STATE ... STATE : PROB ... PROB      (one row per parent instantiation)
    lock NAME STATE [| STATE ... STATE]

Variables must be declared before any CPT mentions them.  Rows may appear
in any order but every parent instantiation must appear exactly once; the
serializer emits them in canonical order (first parent most significant).
Row probabilities must sum to 1 within 1e-9.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .model import (
    ROW_SUM_TOL,
    BayesianNetwork,
    Cpt,
    Variable,
    validate_network,
)


class DocumentError(ValueError):
    """A malformed network document; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _parse_float(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise DocumentError(f"expected a probability, got {token!r}", line_no) from None


def parse_network(text: str) -> BayesianNetwork:
    variables: dict[str, Variable] = {}
    var_order: list[str] = []
    # name -> (parents, {instantiation index: row}, {index: line}, header line)
    cpts: dict[str, tuple[list[Variable], dict[int, list[float]], dict[int, int], int]] = {}
    # name -> [(state, parent state tokens, line)]
    locks: dict[str, list[tuple[str, tuple[str, ...], int]]] = {}
    current: str | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]

        if head == "var":
            if len(tokens) < 4:
                raise DocumentError("var needs a name and at least two states", line_no)
            name, states = tokens[1], tuple(tokens[2:])
            if name in variables:
                raise DocumentError(f"variable {name!r} declared twice", line_no)
            if len(set(states)) != len(states):
                raise DocumentError(f"variable {name!r} repeats a state label", line_no)
            variables[name] = Variable(name, states)
            var_order.append(name)
            current = None

        elif head == "cpt":
            if len(tokens) < 2:
                raise DocumentError("cpt needs a variable name", line_no)
            name = tokens[1]
            if name not in variables:
                raise DocumentError(f"cpt for undeclared variable {name!r}", line_no)
            if name in cpts:
                raise DocumentError(f"duplicate cpt for {name!r}", line_no)
            parent_names = tokens[3:] if len(tokens) > 2 and tokens[2] == "|" else tokens[2:]
            if len(tokens) > 2 and tokens[2] != "|":
                raise DocumentError("expected '|' before the parent list", line_no)
            parents = []
            for p in parent_names:
                if p not in variables:
                    raise DocumentError(f"cpt of {name!r} names undeclared parent {p!r}", line_no)
                parents.append(variables[p])
            cpts[name] = (parents, {}, {}, line_no)
            current = name

        elif head == "lock":
            if len(tokens) < 3:
                raise DocumentError("lock needs a variable name and a state", line_no)
            name, state = tokens[1], tokens[2]
            if name not in variables:
                raise DocumentError(f"lock on undeclared variable {name!r}", line_no)
            if len(tokens) > 3 and tokens[3] != "|":
                raise DocumentError("expected '|' before the lock's parent states", line_no)
            parent_states = tuple(tokens[4:])
            locks.setdefault(name, []).append((state, parent_states, line_no))

        else:
            # A table row for the current cpt.
            if current is None:
                raise DocumentError(f"unexpected content {line!r}; expected var/cpt/lock", line_no)
            parents, rows, row_lines, _ = cpts[current]
            var = variables[current]
            if ":" in tokens:
                sep = tokens.index(":")
                states, probs = tokens[:sep], tokens[sep + 1:]
            else:
                states, probs = [], tokens
            if len(states) != len(parents):
                raise DocumentError(
                    f"row for {current!r} assigns {len(states)} parent state(s); "
                    f"{len(parents)} expected",
                    line_no,
                )
            if len(probs) != var.n_states:
                raise DocumentError(
                    f"row for {current!r} has {len(probs)} probabilities; "
                    f"{var.n_states} expected",
                    line_no,
                )
            for p, s in zip(parents, states):
                if s not in p.values:
                    raise DocumentError(f"{p.name!r} has no state {s!r}", line_no)
            if parents:
                multi = tuple(p.values.index(s) for p, s in zip(parents, states))
                index = int(np.ravel_multi_index(multi, tuple(p.n_states for p in parents)))
            else:
                index = 0
            if index in rows:
                raise DocumentError(
                    f"duplicate row for {current!r}, instantiation "
                    f"{' '.join(states) or '(root)'}",
                    line_no,
                )
            values = [_parse_float(t, line_no) for t in probs]
            if any(not (0.0 <= v <= 1.0) for v in values):
                raise DocumentError(f"probability outside [0,1] in row for {current!r}", line_no)
            if abs(sum(values) - 1.0) > ROW_SUM_TOL:
                inst = " ".join(f"{p.name}={s}" for p, s in zip(parents, states)) or "(root)"
                raise DocumentError(
                    f"row of {current!r} at {inst} sums to {sum(values):.12g}, expected 1",
                    line_no,
                )
            rows[index] = values
            row_lines[index] = line_no

    built = []
    for name in var_order:
        if name not in cpts:
            raise DocumentError(f"variable {name!r} has no cpt")
        parents, rows, _, header_line = cpts[name]
        var = variables[name]
        n_inst = int(np.prod([p.n_states for p in parents])) if parents else 1
        missing = [i for i in range(n_inst) if i not in rows]
        if missing:
            raise DocumentError(
                f"cpt of {name!r} is missing {len(missing)} of {n_inst} rows", header_line
            )
        table = np.array([rows[i] for i in range(n_inst)]).reshape(
            tuple(p.n_states for p in parents) + (var.n_states,)
        )
        cpt = Cpt(var, tuple(parents), table)
        lock_refs = []
        for state, given, line_no in locks.get(name, []):
            if len(given) != len(parents):
                raise DocumentError(
                    f"lock on {name!r} gives {len(given)} parent state(s); {len(parents)} expected",
                    line_no,
                )
            try:
                lock_refs.append(cpt.ref(state, zip((p.name for p in parents), given)))
            except ValueError as exc:
                raise DocumentError(str(exc), line_no) from None
        if lock_refs:
            cpt = Cpt(var, tuple(parents), table, frozenset(lock_refs))
        built.append(cpt)

    net = BayesianNetwork(tuple(variables[n] for n in var_order), tuple(built))
    problems = validate_network(net)
    if problems:
        raise DocumentError("; ".join(str(p) for p in problems))
    return net


def serialize_network(net: BayesianNetwork) -> str:
    """Canonical text for a network; parse(serialize(net)) reproduces it exactly."""
    lines = []
    for v in net.variables:
        lines.append(f"var {v.name} {' '.join(v.values)}")
    for cpt in net.cpts:
        lines.append("")
        if cpt.parents:
            lines.append(f"cpt {cpt.variable.name} | {' '.join(p.name for p in cpt.parents)}")
        else:
            lines.append(f"cpt {cpt.variable.name}")
        for u in range(cpt.n_instantiations):
            row = " ".join(repr(float(x)) for x in cpt.rows[u])
            if cpt.parents:
                states = " ".join(s for _, s in cpt.instantiation(u))
                lines.append(f"  {states} : {row}")
            else:
                lines.append(f"  {row}")
        for ref in sorted(cpt.locks, key=lambda r: cpt.cell(r)):
            if cpt.parents:
                states = " ".join(s for _, s in ref.parent_states)
                lines.append(f"lock {cpt.variable.name} {ref.state} | {states}")
            else:
                lines.append(f"lock {cpt.variable.name} {ref.state}")
    return "\n".join(lines) + "\n"


def load_fire_document() -> str:
    return resources.files("bnsense.data").joinpath("fire.bn").read_text()
