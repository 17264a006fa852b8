import math

import numpy as np
import pytest

from bnsense.engine import posterior
from bnsense.model import (
    BayesianNetwork,
    Cpt,
    ModelError,
    MultiValuedTargetError,
    Variable,
    apply_deltas,
)
from bnsense.sensitivity import QueryConstraint, SensitivityError
from bnsense.softev import (
    SENSOR_STATES,
    attach_virtual_sensors,
    design_soft_evidence,
    optimal_soft_evidence,
)


def test_attach_preserves_posteriors(fire):
    augmented, sensors = attach_virtual_sensors(fire, ["Smoke"])
    assert sensors[0].node_name == "Smoke_sensor"
    base = posterior(fire, {"Fire": "t"}, {"Alarm": "t"})
    assert base == pytest.approx(0.3667, abs=2e-3)
    assert posterior(augmented, {"Fire": "t"}, {"Alarm": "t"}) == pytest.approx(base, abs=1e-12)
    # observing a trivial sensor changes nothing either
    assert posterior(
        augmented, {"Fire": "t"}, {"Alarm": "t", "Smoke_sensor": "on"}
    ) == pytest.approx(base, abs=1e-12)


def test_attach_name_collision(fire):
    with pytest.raises(ModelError):
        attach_virtual_sensors(fire, ["Smoke"], names=["Alarm"])


def test_attach_multivalued_host():
    m = Variable("M", ("a", "b", "c"))
    net = BayesianNetwork((m,), (Cpt(m, (), [0.2, 0.3, 0.5]),))
    with pytest.raises(MultiValuedTargetError):
        attach_virtual_sensors(net, ["M"])


def test_two_sensors_have_disjoint_families(fire):
    from bnsense.distance import families_disjoint

    augmented, sensors = attach_virtual_sensors(fire, ["Tampering", "Fire"])
    assert families_disjoint(augmented, sensors[0].node_name, sensors[1].node_name)


def test_fire_detector_design(fire):
    constraint = QueryConstraint({"Fire": "t"}, {"Alarm": "t"}, "at_least", 0.8)
    augmented, sensors, result = design_soft_evidence(fire, ["Smoke"], constraint)
    t = result.sensors[0]
    assert t.false_positive == pytest.approx(0.1098, abs=2e-3)
    assert t.false_negative == pytest.approx(0.1098, abs=2e-3)
    assert t.likelihood_ratio == pytest.approx(8.11, abs=0.1)
    assert result.achieved_query == pytest.approx(0.8, abs=1e-6)
    # symmetric start keeps the two error rates equal
    assert t.false_positive == pytest.approx(t.false_negative, abs=1e-6)
    # the distance is the sensor-row log-odds change, which is ln(lambda)
    assert result.total_distance == pytest.approx(math.log(t.likelihood_ratio), abs=1e-9)


def test_lambda_round_trip(fire):
    constraint = QueryConstraint({"Fire": "t"}, {"Alarm": "t"}, "at_least", 0.8)
    augmented, sensors, result = design_soft_evidence(fire, ["Smoke"], constraint)
    t = result.sensors[0]
    node = sensors[0].node_name
    # re-encode the sensor CPT from the reported rates and re-query
    rebuilt = augmented.with_cpt(
        node,
        np.array(
            [
                [1.0 - t.false_negative, t.false_negative],
                [t.false_positive, 1.0 - t.false_positive],
            ]
        ),
    )
    again = posterior(rebuilt, {"Fire": "t"}, {"Alarm": "t", node: SENSOR_STATES[0]})
    assert again == pytest.approx(result.achieved_query, abs=1e-6)
    assert (1.0 - t.false_negative) / t.false_positive == pytest.approx(
        t.likelihood_ratio, abs=1e-9
    )


def test_unobserved_sensor_leaves_queries_alone(fire):
    constraint = QueryConstraint({"Fire": "t"}, {"Alarm": "t"}, "at_least", 0.8)
    augmented, sensors, result = design_soft_evidence(fire, ["Smoke"], constraint)
    tuned = apply_deltas(augmented, result.suggestion.deltas)
    base = posterior(fire, {"Fire": "t"}, {"Alarm": "t"})
    # without the sensor observation the tuned sensor is invisible
    assert posterior(tuned, {"Fire": "t"}, {"Alarm": "t"}) == pytest.approx(base, abs=1e-12)
    # and the original network object is untouched
    assert posterior(fire, {"Fire": "t"}, {"Alarm": "t"}) == base


def test_already_satisfied_gives_trivial_sensor(fire):
    constraint = QueryConstraint({"Fire": "t"}, {"Alarm": "t"}, "at_least", 0.3)
    _, _, result = design_soft_evidence(fire, ["Smoke"], constraint)
    t = result.sensors[0]
    assert t.likelihood_ratio == pytest.approx(1.0, abs=1e-12)
    assert result.total_distance == 0.0


def test_lambda_monotone_in_threshold(tiny2):
    lambdas = []
    for p in (0.82, 0.86, 0.9, 0.94):
        constraint = QueryConstraint({"X": "t"}, {"Y": "t"}, "at_least", p)
        _, _, result = design_soft_evidence(tiny2, ["X"], constraint)
        lambdas.append(result.sensors[0].likelihood_ratio)
    assert all(a < b for a, b in zip(lambdas, lambdas[1:]))


def test_two_sensor_design(fire):
    constraint = QueryConstraint({"Alarm": "t"}, {}, "at_least", 0.1)
    augmented, sensors, result = design_soft_evidence(fire, ["Tampering", "Fire"], constraint)
    assert len(result.sensors) == 2
    assert result.achieved_query >= 0.1 - 1e-6
    parts = [abs(math.log(t.likelihood_ratio)) for t in result.sensors]
    assert result.total_distance == pytest.approx(sum(parts), abs=1e-6)


def test_sensor_count_and_observation_preconditions(fire):
    constraint = QueryConstraint({"Fire": "t"}, {"Alarm": "t"}, "at_least", 0.8)
    with pytest.raises(SensitivityError):
        design_soft_evidence(fire, ["Smoke", "Leaving", "Report"], constraint)
    augmented, sensors = attach_virtual_sensors(fire, ["Smoke"])
    with pytest.raises(SensitivityError):
        optimal_soft_evidence(augmented, sensors, constraint)  # sensor not observed
