"""Design of the weakest virtual-evidence sensors that enforce a query constraint.

A sensor is a dummy binary child attached to a host variable, initialized
with a flat table so it changes nothing.  Observing the sensor and then
optimizing its table (minimum log-odds distance, so the evidence disturbs
the network least) yields the likelihood ratio and error rates the sensor
must achieve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import BayesianNetwork, Cpt, ModelError, MultiValuedTargetError, Variable
from .sensitivity import (
    QueryConstraint,
    SensitivityError,
    Suggestion,
    DEFAULT_QUERY_TOL,
    optimal_single_cpt,
    optimal_two_cpt,
)

SENSOR_STATES = ("on", "off")


@dataclass(frozen=True)
class VirtualSensor:
    """A dummy observed child reporting on a binary host variable."""

    host: str
    node_name: str
    positive_host_state: str
    negative_host_state: str


@dataclass(frozen=True)
class SensorTuning:
    sensor: VirtualSensor
    likelihood_ratio: float
    false_positive: float
    false_negative: float


@dataclass(frozen=True)
class SoftEvidenceResult:
    sensors: tuple[SensorTuning, ...]
    total_distance: float
    achieved_query: float
    suggestion: Suggestion


def attach_virtual_sensors(
    net: BayesianNetwork, hosts: Sequence[str], names: Sequence[str] | None = None
) -> tuple[BayesianNetwork, list[VirtualSensor]]:
    """Add one flat observed-child sensor per host; posteriors are unaffected
    until the sensor tables move away from 0.5."""
    names = list(names) if names is not None else [f"{h}_sensor" for h in hosts]
    if len(names) != len(hosts):
        raise ModelError("need exactly one sensor name per host")
    taken = {v.name for v in net.variables}
    variables = list(net.variables)
    cpts = list(net.cpts)
    sensors = []
    for host, name in zip(hosts, names):
        host_var = net.variable(host)
        if not host_var.is_binary:
            raise MultiValuedTargetError(f"sensor hosts must be binary; {host!r} is not")
        if name in taken:
            raise ModelError(f"sensor name {name!r} collides with an existing variable")
        taken.add(name)
        node = Variable(name, SENSOR_STATES)
        variables.append(node)
        cpts.append(Cpt(node, (host_var,), [[0.5, 0.5], [0.5, 0.5]]))
        sensors.append(VirtualSensor(host, name, host_var.values[0], host_var.values[1]))
    return BayesianNetwork(tuple(variables), tuple(cpts)), sensors


def optimal_soft_evidence(
    net: BayesianNetwork,
    sensors: Sequence[VirtualSensor],
    constraint: QueryConstraint,
    eps_q: float = DEFAULT_QUERY_TOL,
) -> SoftEvidenceResult:
    """Weakest sensor tables enforcing the constraint, as likelihood ratios.

    The constraint's evidence must observe every sensor in its 'on' state;
    the optimization is then the usual single- or two-CPT problem restricted
    to the sensor tables.
    """
    if not 1 <= len(sensors) <= 2:
        raise SensitivityError(f"{len(sensors)} sensors given; only one or two are supported")
    for s in sensors:
        if constraint.evidence.get(s.node_name) != SENSOR_STATES[0]:
            raise SensitivityError(
                f"the constraint's evidence must observe {s.node_name}={SENSOR_STATES[0]}"
            )
    if len(sensors) == 1:
        suggestion = optimal_single_cpt(net, constraint, sensors[0].node_name, eps_q)
    else:
        suggestion = optimal_two_cpt(net, constraint, sensors[0].node_name, sensors[1].node_name, eps_q)

    tunings = []
    for s in sensors:
        cpt = net.cpt(s.node_name)
        on_given_pos = cpt.value(cpt.ref(SENSOR_STATES[0], {s.host: s.positive_host_state}))
        on_given_neg = cpt.value(cpt.ref(SENSOR_STATES[0], {s.host: s.negative_host_state}))
        for d in suggestion.deltas:
            if d.target.variable != s.node_name:
                continue
            sign = 1.0 if d.target.state == SENSOR_STATES[0] else -1.0
            if dict(d.target.parent_states)[s.host] == s.positive_host_state:
                on_given_pos += sign * d.delta
            else:
                on_given_neg += sign * d.delta
        tunings.append(
            SensorTuning(
                s,
                likelihood_ratio=on_given_pos / on_given_neg,
                false_positive=on_given_neg,
                false_negative=1.0 - on_given_pos,
            )
        )
    return SoftEvidenceResult(
        tuple(tunings), suggestion.distance, suggestion.achieved_query, suggestion
    )


def design_soft_evidence(
    net: BayesianNetwork,
    hosts: Sequence[str],
    constraint: QueryConstraint,
    eps_q: float = DEFAULT_QUERY_TOL,
) -> tuple[BayesianNetwork, list[VirtualSensor], SoftEvidenceResult]:
    """One-call flow: attach sensors, observe them, optimize their tables.

    The given constraint talks about the original network; its evidence is
    extended with every new sensor observed 'on'.
    """
    augmented, sensors = attach_virtual_sensors(net, hosts)
    evidence = dict(constraint.evidence)
    evidence.update({s.node_name: SENSOR_STATES[0] for s in sensors})
    full = QueryConstraint(constraint.target, evidence, constraint.direction, constraint.threshold)
    return augmented, sensors, optimal_soft_evidence(augmented, sensors, full, eps_q)
