"""Command-line interface.

Every subcommand is a thin shell over the library: it parses arguments,
calls one library function, and prints either a human-readable table or
(with --json) deterministic machine output with 6-significant-digit
numbers.

Exit codes: 0 success, 1 parse/document error, 2 infeasible constraint,
3 precondition violation (locked/extreme parameters, overlapping families,
zero-probability evidence, unknown names).
"""

from __future__ import annotations

import json
import math
import re
import sys

import click

from . import payloads
from .engine import EngineError, posterior
from .model import ModelError, ParameterRef
from .netformat import DocumentError, parse_network
from .sensitivity import (
    InfeasibleError,
    QueryConstraint,
    SensitivityError,
    alpha_single_cpt,
    alpha_two_cpt,
    optimal_single_cpt,
    optimal_two_cpt,
    prune_candidate_cpts,
    solve_single_parameter,
)
from .softev import design_soft_evidence

EXIT_PARSE = 1
EXIT_INFEASIBLE = 2
EXIT_PRECONDITION = 3

_CONSTRAINT_RE = re.compile(r"^\s*P\(([^)]*)\)\s*(<=|>=)\s*([0-9.eE+-]+)\s*$")


class CliInputError(click.ClickException):
    exit_code = EXIT_PARSE


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.6g}"
    return str(x)


def _json6(obj):
    """Round every float to 6 significant digits for byte-stable output."""
    if isinstance(obj, float):
        return obj if math.isinf(obj) or math.isnan(obj) else float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: _json6(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json6(v) for v in obj]
    return obj


def emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        click.echo(json.dumps(_json6(payload), sort_keys=True))
    else:
        click.echo(human)


def parse_assignments(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    if not text.strip():
        return out
    for part in text.split(","):
        if "=" not in part:
            raise CliInputError(f"bad assignment {part.strip()!r}; expected Var=state")
        name, state = part.split("=", 1)
        name, state = name.strip(), state.strip()
        if not name or not state:
            raise CliInputError(f"bad assignment {part.strip()!r}; expected Var=state")
        if name in out:
            raise CliInputError(f"{name!r} assigned twice")
        out[name] = state
    return out


def parse_constraint(text: str, evidence: str) -> QueryConstraint:
    m = _CONSTRAINT_RE.match(text)
    if not m:
        raise CliInputError(
            f"bad constraint {text!r}; expected P(Var=state[,Var=state]) <=|>= threshold"
        )
    target = parse_assignments(m.group(1))
    direction = "at_most" if m.group(2) == "<=" else "at_least"
    try:
        threshold = float(m.group(3))
    except ValueError:
        raise CliInputError(f"bad threshold {m.group(3)!r}") from None
    try:
        return QueryConstraint(target, parse_assignments(evidence), direction, threshold)
    except SensitivityError as exc:
        raise CliInputError(str(exc)) from None


def parse_param(text: str) -> ParameterRef:
    """Var=state or Var=state|Parent=state,Parent=state."""
    head, _, cond = text.partition("|")
    target = parse_assignments(head)
    if len(target) != 1:
        raise CliInputError(f"bad parameter {text!r}; expected Var=state[|Parent=state,...]")
    (var, state), = target.items()
    return ParameterRef(var, state, tuple(parse_assignments(cond).items()))


def load_network(path: str):
    try:
        with open(path) as fh:
            return parse_network(fh.read())
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from None
    except DocumentError as exc:
        raise CliInputError(str(exc)) from None


def run_guarded(fn):
    """Map library errors onto the documented exit codes."""
    try:
        return fn()
    except InfeasibleError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except (ModelError, EngineError, SensitivityError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PRECONDITION)


@click.group()
def main():
    """Sensitivity analysis for discrete Bayesian networks."""


@main.command()
@click.argument("network", type=click.Path())
@click.option("--target", required=True, help="event, e.g. Tampering=t")
@click.option("--evidence", default="", help="comma-separated assignments")
@click.option("--json", "as_json", is_flag=True)
def query(network, target, evidence, as_json):
    """Posterior probability of a target event given evidence."""
    net = load_network(network)
    z, e = parse_assignments(target), parse_assignments(evidence)
    value = run_guarded(lambda: posterior(net, z, e))
    cond = f" | {evidence}" if e else ""
    emit(
        {"target": z, "evidence": e, "posterior": value},
        as_json,
        f"Pr({target}{cond}) = {_fmt(value)}",
    )


@main.group()
def suggest():
    """Parameter-change suggestions enforcing a constraint."""


def _constraint_options(fn):
    fn = click.option("--evidence", default="", help="comma-separated assignments")(fn)
    fn = click.option("--constraint", "constraint_text", required=True,
                      help='e.g. "P(Fire=t)<=0.025"')(fn)
    return fn


@suggest.command("param")
@click.argument("network", type=click.Path())
@_constraint_options
@click.option("--param", "param_text", default=None,
              help="restrict to one parameter, e.g. 'Alarm=t|Tampering=t,Fire=f'")
@click.option("--json", "as_json", is_flag=True)
def suggest_param(network, constraint_text, evidence, param_text, as_json):
    """Admissible single-parameter changes (all parameters, or one)."""
    net = load_network(network)
    constraint = parse_constraint(constraint_text, evidence)

    def solve_all():
        solutions = []
        if param_text is not None:
            solutions.append(solve_single_parameter(net, constraint, parse_param(param_text)))
        else:
            for v in net.variables:
                if not v.is_binary:
                    continue
                cpt = net.cpt(v.name)
                for ref in cpt.refs():
                    try:
                        solutions.append(solve_single_parameter(net, constraint, ref))
                    except SensitivityError:
                        continue
                    except ModelError:
                        continue
        return solutions

    solutions = run_guarded(solve_all)
    solutions.sort(key=lambda s: (not s.feasible, s.distance if s.distance is not None else math.inf))
    lines = [f"constraint: {constraint.describe()}"]
    for s in solutions:
        if s.feasible:
            lines.append(
                f"  {s.param.describe()}: {_fmt(s.current)} -> [{_fmt(s.interval[0])}, {_fmt(s.interval[1])}]"
                f"  suggested {_fmt(s.suggested)}  |dlog-odds| {_fmt(s.distance)}"
            )
        else:
            lines.append(f"  {s.param.describe()}: infeasible")
    emit(
        {
            "constraint": payloads.constraint_payload(constraint),
            "solutions": [payloads.parameter_solution_payload(s) for s in solutions],
        },
        as_json,
        "\n".join(lines),
    )


@suggest.command("cpt")
@click.argument("network", type=click.Path())
@click.argument("variable")
@_constraint_options
@click.option("--json", "as_json", is_flag=True)
def suggest_cpt(network, variable, constraint_text, evidence, as_json):
    """Optimal whole-CPT change (equal log-odds movement) plus its coefficient report."""
    net = load_network(network)
    constraint = parse_constraint(constraint_text, evidence)
    report, suggestion = run_guarded(
        lambda: (alpha_single_cpt(net, constraint, variable),
                 optimal_single_cpt(net, constraint, variable))
    )
    lines = [f"constraint: {constraint.describe()}", f"cpt: {variable}"]
    for entry in payloads.alpha_report_payload(net, report)["alphas"]:
        p = entry["param"]
        cond = ", ".join(f"{k}={v}" for k, v in p["parents"].items())
        label = f"P({p['variable']}={p['state']}" + (f" | {cond})" if cond else ")")
        lines.append(f"  alpha {label} = {_fmt(entry['alpha'])}" + ("  (inert)" if entry["inert"] else ""))
    lines.append(f"  rhs = {_fmt(report.rhs)}")
    for d in suggestion.deltas:
        lines.append(
            f"  {d.target.describe()}: {_fmt(net.theta(d.target))} -> {_fmt(net.theta(d.target) + d.delta)}"
        )
    lines.append(f"achieved = {_fmt(suggestion.achieved_query)}  distance = {_fmt(suggestion.distance)}")
    emit(
        {
            "report": payloads.alpha_report_payload(net, report),
            "suggestion": payloads.suggestion_payload(net, suggestion),
        },
        as_json,
        "\n".join(lines),
    )


@suggest.command("two-cpt")
@click.argument("network", type=click.Path())
@click.argument("variable_x")
@click.argument("variable_y")
@_constraint_options
@click.option("--json", "as_json", is_flag=True)
def suggest_two_cpt(network, variable_x, variable_y, constraint_text, evidence, as_json):
    """Optimal joint change to two disjoint-family CPTs, with bilinear coefficients."""
    net = load_network(network)
    constraint = parse_constraint(constraint_text, evidence)
    report, suggestion = run_guarded(
        lambda: (alpha_two_cpt(net, constraint, variable_x, variable_y),
                 optimal_two_cpt(net, constraint, variable_x, variable_y))
    )
    rp = payloads.alpha_report_payload(net, report)
    lines = [f"constraint: {constraint.describe()}", f"cpts: {variable_x}, {variable_y}"]
    for entry in rp["alphas"]:
        p = entry["param"]
        cond = ", ".join(f"{k}={v}" for k, v in p["parents"].items())
        label = f"P({p['variable']}={p['state']}" + (f" | {cond})" if cond else ")")
        lines.append(f"  alpha {label} = {_fmt(entry['alpha'])}")
    for entry in rp["cross_alphas"]:
        lines.append(
            f"  cross {entry['param_x']['variable']}={entry['param_x']['state']} x "
            f"{entry['param_y']['variable']}={entry['param_y']['state']} = {_fmt(entry['alpha'])}"
        )
    lines.append(f"  rhs = {_fmt(report.rhs)}")
    for d in suggestion.deltas:
        lines.append(f"  {d.target.describe()}: delta {_fmt(d.delta)}")
    lines.append(f"achieved = {_fmt(suggestion.achieved_query)}  distance = {_fmt(suggestion.distance)}")
    emit(
        {"report": rp, "suggestion": payloads.suggestion_payload(net, suggestion)},
        as_json,
        "\n".join(lines),
    )


@main.command()
@click.argument("network", type=click.Path())
@_constraint_options
@click.option("--json", "as_json", is_flag=True)
def relevance(network, constraint_text, evidence, as_json):
    """Rank CPTs by how strongly their parameters can move the constrained query."""
    net = load_network(network)
    constraint = parse_constraint(constraint_text, evidence)
    ranked = run_guarded(lambda: prune_candidate_cpts(net, constraint))
    lines = [f"constraint: {constraint.describe()}"] + [
        f"  {name}: {_fmt(strength)}" for name, strength in ranked
    ]
    emit(payloads.relevance_payload(ranked), as_json, "\n".join(lines))


@main.command()
@click.argument("network", type=click.Path())
@click.option("--hosts", required=True, help="comma-separated host variables (one or two)")
@_constraint_options
@click.option("--json", "as_json", is_flag=True)
def softev(network, hosts, constraint_text, evidence, as_json):
    """Weakest virtual-evidence sensors (likelihood ratios) enforcing the constraint."""
    net = load_network(network)
    constraint = parse_constraint(constraint_text, evidence)
    host_list = [h.strip() for h in hosts.split(",") if h.strip()]
    _, _, result = run_guarded(lambda: design_soft_evidence(net, host_list, constraint))
    lines = [f"constraint: {constraint.describe()}"]
    for t in result.sensors:
        lines.append(
            f"  sensor {t.sensor.node_name} on {t.sensor.host}: lambda = {_fmt(t.likelihood_ratio)}"
            f"  false-positive = {_fmt(t.false_positive)}  false-negative = {_fmt(t.false_negative)}"
        )
    lines.append(f"achieved = {_fmt(result.achieved_query)}  distance = {_fmt(result.total_distance)}")
    emit(payloads.softev_payload(result), as_json, "\n".join(lines))


@main.command()
@click.option("--d", "d_value", type=float, required=True, help="distance measure")
@click.option("--p", "p_value", type=float, default=None, help="single query value")
@click.option("--points", type=int, default=101, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bounds(d_value, p_value, points, as_json):
    """Envelope of reachable query values after a change of the given distance."""
    payload = run_guarded(lambda: payloads.bounds_payload(d_value, p_value, points))
    if p_value is not None:
        human = f"({_fmt(payload['lower'])}, {_fmt(payload['upper'])})"
    else:
        human = "\n".join(f"{_fmt(p)} {_fmt(lo)} {_fmt(hi)}" for p, lo, hi in payload["points"])
    emit(payload, as_json, human)


@main.command("solution-space")
@click.argument("network", type=click.Path())
@_constraint_options
@click.option("--cpt", "cpt_var", default=None, help="single CPT to analyze")
@click.option("--two-cpt", "two_cpt", nargs=2, default=None, help="pair of CPTs")
@click.option("--samples", type=int, default=payloads.BOUNDARY_SAMPLES, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def solution_space(network, constraint_text, evidence, cpt_var, two_cpt, samples, as_json):
    """Inequality coefficients plus a sampled boundary polyline for two-parameter cases."""
    if (cpt_var is None) == (not two_cpt):
        raise CliInputError("give exactly one of --cpt or --two-cpt")
    net = load_network(network)
    constraint = parse_constraint(constraint_text, evidence)
    if cpt_var is not None:
        report = run_guarded(lambda: alpha_single_cpt(net, constraint, cpt_var))
    else:
        report = run_guarded(lambda: alpha_two_cpt(net, constraint, two_cpt[0], two_cpt[1]))
    payload = payloads.solution_space_payload(net, report, samples)
    lines = [f"rhs = {_fmt(report.rhs)}"]
    for entry in payload["alphas"]:
        p = entry["param"]
        lines.append(f"alpha {p['variable']}={p['state']} {p['parents']} = {_fmt(entry['alpha'])}")
    if payload.get("cross_alphas"):
        for entry in payload["cross_alphas"]:
            lines.append(f"cross = {_fmt(entry['alpha'])}")
    if payload["boundary"]:
        lines.append("boundary:")
        lines.extend(f"{_fmt(d1)} {_fmt(d2)}" for d1, d2 in payload["boundary"]["points"])
    emit(payload, as_json, "\n".join(lines))


@main.command()
@click.argument("network", type=click.Path())
def validate(network):
    """Check a network document; list violations if any."""
    try:
        with open(network) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliInputError(f"cannot read {network}: {exc}") from None
    try:
        parse_network(text)
    except DocumentError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_PARSE)
    click.echo("ok")


if __name__ == "__main__":
    main()
