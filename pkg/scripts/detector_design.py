#!/usr/bin/env python3
"""Detector design on the fire network: how reliable must a smoke detector
be so that, when it triggers alongside the alarm, the fire posterior
reaches a target?  Sweeps the target and writes the required error rates
and likelihood ratios to out/detector_sweep.csv.
"""

import csv
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from bnsense.engine import posterior
from bnsense.fixtures import fire_network
from bnsense.sensitivity import InfeasibleError, QueryConstraint
from bnsense.softev import design_soft_evidence

OUT = pathlib.Path(__file__).resolve().parents[1] / "out"


def main():
    OUT.mkdir(exist_ok=True)
    net = fire_network()
    base = posterior(net, {"Fire": "t"}, {"Alarm": "t"})
    print(f"Pr(Fire=t | Alarm=t) = {base:.4f} before any detector")

    rows = []
    for target in [round(0.4 + 0.05 * k, 2) for k in range(12)]:
        constraint = QueryConstraint({"Fire": "t"}, {"Alarm": "t"}, "at_least", target)
        try:
            _, _, result = design_soft_evidence(net, ["Smoke"], constraint)
        except InfeasibleError:
            print(f"  target {target:.2f}: infeasible")
            continue
        tuning = result.sensors[0]
        rows.append(
            [target, tuning.false_positive, tuning.false_negative,
             tuning.likelihood_ratio, result.total_distance]
        )
        print(
            f"  target {target:.2f}: false +/- = {tuning.false_positive:.4f}"
            f"  lambda = {tuning.likelihood_ratio:.3f}  D = {result.total_distance:.3f}"
        )

    path = OUT / "detector_sweep.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target", "false_positive", "false_negative", "likelihood_ratio", "distance"])
        writer.writerows(rows)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
