#!/usr/bin/env python3
"""Record service responses as JSON fixtures for the frontend test suite.

The UI must display exactly what the service returns, so its tests replay
these recordings.  Re-run after any change to payload shapes and commit the
result.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fastapi.testclient import TestClient

from bnsense.model import ParameterDelta, ParameterRef
from bnsense.netformat import load_fire_document, parse_network
from bnsense.sensitivity import QueryConstraint, alpha_two_cpt, satisfies_solution_space
from bnsense.service import create_app

FIXDIR = pathlib.Path(__file__).resolve().parents[1] / "frontend" / "fixtures"


def write(name: str, payload) -> None:
    path = FIXDIR / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


def main():
    FIXDIR.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app())
    doc = load_fire_document()

    created = client.post("/sessions", json={"document": doc}).json()
    sid = created["session_id"]
    write("session", created)

    client.put(f"/sessions/{sid}/evidence", json={"assignments": {"Smoke": "t", "Leaving": "t"}})
    write("network", client.get(f"/sessions/{sid}/network").json())
    write("query_f1", client.post(f"/sessions/{sid}/query", json={"target": {"Tampering": "t"}}).json())
    write("marginals", client.get(f"/sessions/{sid}/marginals").json())

    constraint_25 = {
        "target": {"Tampering": "t"},
        "evidence": {"Smoke": "t", "Leaving": "t"},
        "direction": "at_most",
        "threshold": 0.025,
    }
    write("relevance", client.post(f"/sessions/{sid}/relevance", json=constraint_25).json())
    write(
        "suggest_param",
        client.post(f"/sessions/{sid}/suggest/param", json=constraint_25).json(),
    )
    write(
        "suggest_cpt_alarm",
        client.post(f"/sessions/{sid}/suggest/cpt", json={**constraint_25, "variable": "Alarm"}).json(),
    )

    two_cpt_body = {
        "target": {"Fire": "t"},
        "evidence": {"Leaving": "t", "Smoke": "f"},
        "direction": "at_most",
        "threshold": 0.025,
        "variable_x": "Fire",
        "variable_y": "Tampering",
    }
    two = client.post(f"/sessions/{sid}/suggest/two-cpt", json=two_cpt_body).json()
    write("suggest_two_cpt", two)

    space = client.post(
        f"/sessions/{sid}/solution-space",
        json={**{k: v for k, v in two_cpt_body.items() if not k.startswith("variable")},
              "two_cpt": ["Fire", "Tampering"], "samples": 128},
    ).json()
    # membership grid for the region-shading test, classified by the library
    net = parse_network(doc)
    constraint = QueryConstraint(
        two_cpt_body["target"], two_cpt_body["evidence"], "at_most", 0.025
    )
    report = alpha_two_cpt(net, constraint, "Fire", "Tampering")
    rf, rt = ParameterRef("Fire", "t", ()), ParameterRef("Tampering", "t", ())
    samples = []
    for i in range(11):
        for j in range(11):
            d1 = -0.009 + 0.018 * i / 10
            d2 = -0.019 + 0.21 * j / 10
            member = satisfies_solution_space(
                report, [ParameterDelta(rf, d1), ParameterDelta(rt, d2)]
            )
            samples.append({"d1": d1, "d2": d2, "member": member})
    space["membership_samples"] = samples
    write("solution_space", space)

    write("bounds", client.get("/bounds", params={"d": 0.445, "points": 41}).json())

    softev_body = {
        "target": {"Fire": "t"},
        "evidence": {"Alarm": "t"},
        "direction": "at_least",
        "threshold": 0.8,
        "hosts": ["Smoke"],
        "attach": False,
    }
    write("softev", client.post(f"/sessions/{sid}/softev", json=softev_body).json())

    # apply/undo round trip on the two-CPT suggestion
    before = client.post(f"/sessions/{sid}/query", json={
        "target": {"Fire": "t"}, "evidence": {"Leaving": "t", "Smoke": "f"}}).json()
    deltas = [{"param": d["param"], "delta": d["delta"]} for d in two["suggestion"]["deltas"]]
    applied = client.post(f"/sessions/{sid}/apply", json={"deltas": deltas}).json()
    after_apply = client.post(f"/sessions/{sid}/query", json={
        "target": {"Fire": "t"}, "evidence": {"Leaving": "t", "Smoke": "f"}}).json()
    undone = client.post(f"/sessions/{sid}/undo").json()
    after_undo = client.post(f"/sessions/{sid}/query", json={
        "target": {"Fire": "t"}, "evidence": {"Leaving": "t", "Smoke": "f"}}).json()
    write("apply_undo", {
        "before": before,
        "apply": applied,
        "after_apply": after_apply,
        "undo": undone,
        "after_undo": after_undo,
    })


if __name__ == "__main__":
    main()
