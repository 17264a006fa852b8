import json
import threading

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from bnsense.cli import main as cli_main
from bnsense.netformat import load_fire_document
from bnsense.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def session(client):
    r = client.post("/sessions", json={"document": load_fire_document()})
    assert r.status_code == 200
    return r.json()["session_id"]


def test_create_session_returns_summary(client):
    r = client.post("/sessions", json={"document": load_fire_document()})
    body = r.json()
    names = [v["name"] for v in body["network"]["variables"]]
    assert names == ["Tampering", "Fire", "Alarm", "Smoke", "Leaving", "Report"]
    assert ["Alarm", "Leaving"] in body["network"]["edges"]


def test_bad_document_is_400(client):
    r = client.post("/sessions", json={"document": "var A t f\ncpt A\n  0.7 0.7\n"})
    assert r.status_code == 400
    assert "sums to" in r.json()["detail"]


def test_malformed_body_is_400(client, session):
    r = client.post(f"/sessions/{session}/query", json={"target": "not-a-dict"})
    assert r.status_code == 400


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope/network").status_code == 404


def test_query_with_session_evidence(client, session):
    client.put(f"/sessions/{session}/evidence", json={"assignments": {"Smoke": "t", "Leaving": "t"}})
    r = client.post(f"/sessions/{session}/query", json={"target": {"Tampering": "t"}})
    assert r.json()["posterior"] == pytest.approx(0.0287, abs=1e-3)
    client.delete(f"/sessions/{session}/evidence")
    r = client.post(f"/sessions/{session}/query", json={"target": {"Tampering": "t"}})
    assert r.json()["posterior"] == pytest.approx(0.02, abs=1e-12)


def test_marginals_endpoint(client, session):
    client.put(f"/sessions/{session}/evidence", json={"assignments": {"Alarm": "t"}})
    r = client.get(f"/sessions/{session}/marginals")
    body = r.json()
    assert body["marginals"]["Fire"]["t"] == pytest.approx(0.3667, abs=2e-3)
    assert body["marginals"]["Alarm"] == {"t": 1.0, "f": 0.0}


def test_apply_undo_round_trip(client, session):
    before = client.post(f"/sessions/{session}/query", json={"target": {"Tampering": "t"}}).json()
    r = client.post(
        f"/sessions/{session}/apply",
        json={"deltas": [{"param": {"variable": "Tampering", "state": "t"}, "delta": -0.013}]},
    )
    assert r.status_code == 200 and r.json()["can_undo"]
    changed = client.post(f"/sessions/{session}/query", json={"target": {"Tampering": "t"}}).json()
    assert changed["posterior"] != before["posterior"]
    assert client.post(f"/sessions/{session}/undo").status_code == 200
    after = client.post(f"/sessions/{session}/query", json={"target": {"Tampering": "t"}}).json()
    assert after["posterior"] == before["posterior"]  # bit-for-bit restoration


def test_undo_empty_history_is_422(client, session):
    assert client.post(f"/sessions/{session}/undo").status_code == 422


def test_sessions_are_isolated(client):
    doc = load_fire_document()
    s1 = client.post("/sessions", json={"document": doc}).json()["session_id"]
    s2 = client.post("/sessions", json={"document": doc}).json()["session_id"]
    client.post(
        f"/sessions/{s1}/apply",
        json={"deltas": [{"param": {"variable": "Fire", "state": "t"}, "delta": 0.05}]},
    )
    p1 = client.post(f"/sessions/{s1}/query", json={"target": {"Fire": "t"}}).json()["posterior"]
    p2 = client.post(f"/sessions/{s2}/query", json={"target": {"Fire": "t"}}).json()["posterior"]
    assert p1 == pytest.approx(0.06, abs=1e-12)
    assert p2 == pytest.approx(0.01, abs=1e-12)


def test_suggest_cpt_endpoint_matches_cli(client, session, tmp_path):
    body = {
        "target": {"Fire": "t"},
        "evidence": {"Leaving": "t", "Smoke": "f"},
        "direction": "at_most",
        "threshold": 0.025,
        "variable_x": "Fire",
        "variable_y": "Tampering",
    }
    r = client.post(f"/sessions/{session}/suggest/two-cpt", json=body)
    assert r.status_code == 200
    service_payload = r.json()

    path = tmp_path / "fire.bn"
    path.write_text(load_fire_document())
    cli = CliRunner().invoke(
        cli_main,
        ["suggest", "two-cpt", str(path), "Fire", "Tampering",
         "--constraint", "P(Fire=t)<=0.025", "--evidence", "Leaving=t,Smoke=f", "--json"],
    )
    cli_payload = json.loads(cli.output)

    def six(x):
        return float(f"{x:.6g}")

    svc_alphas = [six(a["alpha"]) for a in service_payload["report"]["alphas"]]
    cli_alphas = [a["alpha"] for a in cli_payload["report"]["alphas"]]
    assert svc_alphas == cli_alphas
    assert six(service_payload["report"]["rhs"]) == cli_payload["report"]["rhs"]
    assert six(service_payload["suggestion"]["distance"]) == cli_payload["suggestion"]["distance"]
    svc_deltas = [six(d["delta"]) for d in service_payload["suggestion"]["deltas"]]
    cli_deltas = [d["delta"] for d in cli_payload["suggestion"]["deltas"]]
    assert svc_deltas == cli_deltas


def test_suggest_param_endpoint(client, session):
    r = client.post(
        f"/sessions/{session}/suggest/param",
        json={
            "target": {"Tampering": "t"},
            "evidence": {"Smoke": "t", "Leaving": "t"},
            "direction": "at_most",
            "threshold": 0.01,
        },
    )
    sols = r.json()["solutions"]
    tampering = [
        s for s in sols
        if s["param"]["variable"] == "Tampering" and s["param"]["state"] == "t" and s["feasible"]
    ]
    assert tampering and tampering[0]["interval"][1] == pytest.approx(0.007, abs=5e-4)


def test_relevance_endpoint(client, session):
    r = client.post(
        f"/sessions/{session}/relevance",
        json={
            "target": {"Tampering": "t"},
            "evidence": {"Smoke": "t", "Leaving": "t"},
            "direction": "at_most",
            "threshold": 0.01,
        },
    )
    names = [x["variable"] for x in r.json()["ranking"]]
    assert "Report" not in names and "Alarm" in names


def test_softev_endpoint_with_attach(client, session):
    r = client.post(
        f"/sessions/{session}/softev",
        json={
            "target": {"Fire": "t"},
            "evidence": {"Alarm": "t"},
            "direction": "at_least",
            "threshold": 0.8,
            "hosts": ["Smoke"],
            "attach": True,
        },
    )
    body = r.json()
    assert body["attached"] is True
    assert body["result"]["sensors"][0]["likelihood_ratio"] == pytest.approx(8.11, abs=0.1)
    # sensor now exists in the session network; applying its suggestion works
    r = client.post(f"/sessions/{session}/apply", json={"deltas": [
        {"param": d["param"], "delta": d["delta"]} for d in body["suggestion"]["deltas"]
    ]})
    assert r.status_code == 200
    r = client.post(
        f"/sessions/{session}/query",
        json={"target": {"Fire": "t"}, "evidence": {"Alarm": "t", "Smoke_sensor": "on"}},
    )
    assert r.json()["posterior"] == pytest.approx(0.8, abs=1e-5)
    # undo twice: suggestion, then attachment
    assert client.post(f"/sessions/{session}/undo").status_code == 200
    assert client.post(f"/sessions/{session}/undo").status_code == 200
    names = [v["name"] for v in client.get(f"/sessions/{session}/network").json()["network"]["variables"]]
    assert "Smoke_sensor" not in names


def test_solution_space_endpoint(client, session):
    r = client.post(
        f"/sessions/{session}/solution-space",
        json={
            "target": {"Fire": "t"},
            "evidence": {"Leaving": "t", "Smoke": "f"},
            "direction": "at_most",
            "threshold": 0.025,
            "two_cpt": ["Fire", "Tampering"],
            "samples": 64,
        },
    )
    assert r.status_code == 200
    assert r.json()["boundary"]["points"]


def test_precondition_violation_is_422_with_library_text(client, session):
    r = client.post(
        f"/sessions/{session}/suggest/two-cpt",
        json={
            "target": {"Tampering": "t"},
            "evidence": {"Smoke": "t"},
            "direction": "at_most",
            "threshold": 0.01,
            "variable_x": "Fire",
            "variable_y": "Smoke",
        },
    )
    assert r.status_code == 422
    assert "families of 'Fire' and 'Smoke' overlap" in r.json()["detail"]


def test_infeasible_suggestion_reported_in_band(client):
    doc = (
        "var X t f\nvar Y t f\n"
        "cpt X\n  0.5 0.5\n"
        "cpt Y | X\n  t : 0.8 0.2\n  f : 0.2 0.8\n"
        "lock Y t | f\n"
    )
    sid = client.post("/sessions", json={"document": doc}).json()["session_id"]
    r = client.post(
        f"/sessions/{sid}/suggest/cpt",
        json={
            "target": {"X": "t"},
            "evidence": {"Y": "t"},
            "direction": "at_least",
            "threshold": 0.99,
            "variable": "Y",
        },
    )
    assert r.status_code == 200
    assert r.json()["suggestion"]["feasible"] is False
    assert "reason" in r.json()["suggestion"]


def test_lock_endpoint_round_trip(client, session):
    param = {"variable": "Alarm", "state": "t", "parents": {"Tampering": "t", "Fire": "f"}}
    r = client.put(f"/sessions/{session}/locks", json={"param": param, "locked": True})
    assert r.status_code == 200
    summary = client.get(f"/sessions/{session}/network").json()["network"]
    alarm = [c for c in summary["cpts"] if c["variable"] == "Alarm"][0]
    locked_rows = [row for row in alarm["rows"] if row["locked"]]
    assert locked_rows and locked_rows[0]["instantiation"] == {"Tampering": "t", "Fire": "f"}
    r = client.put(f"/sessions/{session}/locks", json={"param": param, "locked": False})
    summary = client.get(f"/sessions/{session}/network").json()["network"]
    alarm = [c for c in summary["cpts"] if c["variable"] == "Alarm"][0]
    assert not any(row["locked"] for row in alarm["rows"])


def test_bounds_endpoint(client):
    r = client.get("/bounds", params={"d": 0.0, "p": 0.5})
    assert r.json() == {"d": 0.0, "p": 0.5, "lower": 0.5, "upper": 0.5}
    r = client.get("/bounds", params={"d": 0.445, "points": 11})
    assert len(r.json()["points"]) == 11


def test_idle_sessions_expire():
    client = TestClient(create_app(session_ttl=0.0))
    sid = client.post("/sessions", json={"document": load_fire_document()}).json()["session_id"]
    r = client.post(f"/sessions/{sid}/query", json={"target": {"Fire": "t"}})
    assert r.status_code == 404


def test_deadline_times_out_long_computation():
    client = TestClient(create_app(deadline=0.0))
    sid = client.post("/sessions", json={"document": load_fire_document()}).json()["session_id"]
    r = client.post(
        f"/sessions/{sid}/suggest/two-cpt",
        json={
            "target": {"Fire": "t"},
            "evidence": {"Leaving": "t", "Smoke": "f"},
            "direction": "at_most",
            "threshold": 0.025,
            "variable_x": "Fire",
            "variable_y": "Tampering",
        },
    )
    assert r.status_code == 503
    assert "deadline" in r.json()["detail"]


def test_concurrent_apply_undo_is_serialized(client, session):
    before = client.get(f"/sessions/{session}/network").json()["document"]

    def worker(k):
        delta = 0.001 * (k + 1)
        r1 = client.post(
            f"/sessions/{session}/apply",
            json={"deltas": [{"param": {"variable": "Fire", "state": "t"}, "delta": delta}]},
        )
        assert r1.status_code == 200
        r2 = client.post(f"/sessions/{session}/undo")
        assert r2.status_code == 200

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    after = client.get(f"/sessions/{session}/network").json()
    assert after["document"] == before
    assert after["can_undo"] is False
