"""Small reference networks used by tests, docs, and the CLI demos."""

from __future__ import annotations

from .model import BayesianNetwork, Cpt, Variable

TF = ("t", "f")


def _binary(name: str) -> Variable:
    return Variable(name, TF)


def fire_network() -> BayesianNetwork:
    """The six-variable building-fire alarm network.

    Tampering and Fire are root causes of Alarm; Fire also produces Smoke;
    Alarm drives Leaving which drives Report.  Entries are the standard
    literature values for this network; the regression suite pins the
    posteriors they imply (2.87%, 5.2%, 36.67%).
    """
    tampering, fire, alarm = _binary("Tampering"), _binary("Fire"), _binary("Alarm")
    smoke, leaving, report = _binary("Smoke"), _binary("Leaving"), _binary("Report")
    return BayesianNetwork(
        (tampering, fire, alarm, smoke, leaving, report),
        (
            Cpt(tampering, (), [0.02, 0.98]),
            Cpt(fire, (), [0.01, 0.99]),
            Cpt(
                alarm,
                (tampering, fire),
                [
                    [[0.5, 0.5], [0.85, 0.15]],
                    [[0.99, 0.01], [0.0001, 0.9999]],
                ],
            ),
            Cpt(smoke, (fire,), [[0.9, 0.1], [0.01, 0.99]]),
            Cpt(leaving, (alarm,), [[0.88, 0.12], [0.001, 0.999]]),
            Cpt(report, (leaving,), [[0.75, 0.25], [0.01, 0.99]]),
        ),
    )


def tiny2_network() -> BayesianNetwork:
    """Two binary variables: X -> Y with P(x)=0.5, P(y|x)=0.8, P(y|~x)=0.2."""
    x, y = _binary("X"), _binary("Y")
    return BayesianNetwork(
        (x, y),
        (
            Cpt(x, (), [0.5, 0.5]),
            Cpt(y, (x,), [[0.8, 0.2], [0.2, 0.8]]),
        ),
    )


def tiny3_network() -> BayesianNetwork:
    """Chain X -> Y -> W, all binary, interior parameters."""
    x, y, w = _binary("X"), _binary("Y"), _binary("W")
    return BayesianNetwork(
        (x, y, w),
        (
            Cpt(x, (), [0.3, 0.7]),
            Cpt(y, (x,), [[0.7, 0.3], [0.4, 0.6]]),
            Cpt(w, (y,), [[0.6, 0.4], [0.1, 0.9]]),
        ),
    )
