"""HTTP facade over the analysis engine, with per-session networks and undo.

Sessions are in-memory and expire after an idle timeout; the uploaded
network document is the durable artifact.  Within a session, mutating
requests are serialized by a per-session lock; sessions never observe each
other's changes.  Long-running suggestion searches run under a deadline
and report a timeout error instead of blocking the service.
"""

from __future__ import annotations

import concurrent.futures
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import payloads
from .engine import EngineError, posterior
from .model import (
    BayesianNetwork,
    ModelError,
    ParameterDelta,
    ParameterRef,
    apply_deltas,
)
from .netformat import DocumentError, parse_network, serialize_network
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
from .softev import attach_virtual_sensors, design_soft_evidence

DEFAULT_SESSION_TTL = 3600.0
DEFAULT_DEADLINE = 30.0


@dataclass
class Session:
    id: str
    network: BayesianNetwork
    evidence: dict[str, str] = field(default_factory=dict)
    history: list[tuple[tuple[ParameterDelta, ...], BayesianNetwork]] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock)
    last_access: float = field(default_factory=time.monotonic)


class ParamBody(BaseModel):
    variable: str
    state: str
    parents: dict[str, str] = Field(default_factory=dict)

    def to_ref(self) -> ParameterRef:
        return ParameterRef(self.variable, self.state, tuple(self.parents.items()))


class DeltaBody(BaseModel):
    param: ParamBody
    delta: float


class CreateSessionBody(BaseModel):
    document: str


class EvidenceBody(BaseModel):
    assignments: dict[str, str]


class QueryBody(BaseModel):
    target: dict[str, str]
    evidence: dict[str, str] | None = None


class ConstraintBody(BaseModel):
    target: dict[str, str]
    direction: str
    threshold: float
    evidence: dict[str, str] | None = None  # session evidence when omitted


class ParamSuggestBody(ConstraintBody):
    param: ParamBody | None = None


class CptSuggestBody(ConstraintBody):
    variable: str


class TwoCptSuggestBody(ConstraintBody):
    variable_x: str
    variable_y: str


class SoftevBody(ConstraintBody):
    hosts: list[str]
    attach: bool = False


class SolutionSpaceBody(ConstraintBody):
    cpt: str | None = None
    two_cpt: tuple[str, str] | None = None
    samples: int = payloads.BOUNDARY_SAMPLES


class ApplyBody(BaseModel):
    deltas: list[DeltaBody]


class LockBody(BaseModel):
    param: ParamBody
    locked: bool


def create_app(
    session_ttl: float = DEFAULT_SESSION_TTL,
    deadline: float = DEFAULT_DEADLINE,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="bnsense", version="0.1.0")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    pool = concurrent.futures.ThreadPoolExecutor(max_workers=8)

    def get_session(session_id: str) -> Session:
        now = time.monotonic()
        with registry_lock:
            for sid in [s for s, sess in sessions.items() if now - sess.last_access > session_ttl]:
                del sessions[sid]
            sess = sessions.get(session_id)
            if sess is None:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            sess.last_access = now
            return sess

    def constraint_of(sess: Session, body: ConstraintBody) -> QueryConstraint:
        evidence = body.evidence if body.evidence is not None else dict(sess.evidence)
        return QueryConstraint(body.target, evidence, body.direction, body.threshold)

    def compute(fn: Callable):
        """Run a possibly long computation under the request deadline."""
        future = pool.submit(fn)
        try:
            return future.result(timeout=deadline)
        except concurrent.futures.TimeoutError:
            raise HTTPException(
                status_code=503,
                detail=f"computation exceeded the {deadline:g}s deadline and was abandoned; "
                "partial progress is discarded",
            ) from None

    @app.exception_handler(SensitivityError)
    @app.exception_handler(ModelError)
    @app.exception_handler(EngineError)
    def precondition_handler(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(DocumentError)
    def document_handler(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    def malformed_handler(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        net = parse_network(body.document)
        sess = Session(id=uuid.uuid4().hex, network=net)
        with registry_lock:
            sessions[sess.id] = sess
        return {"session_id": sess.id, "network": payloads.network_summary(net)}

    @app.get("/sessions/{session_id}/network")
    def network_summary(session_id: str):
        sess = get_session(session_id)
        with sess.lock:
            return {
                "network": payloads.network_summary(sess.network),
                "evidence": dict(sess.evidence),
                "can_undo": bool(sess.history),
                "document": serialize_network(sess.network),
            }

    @app.put("/sessions/{session_id}/evidence")
    def set_evidence(session_id: str, body: EvidenceBody):
        sess = get_session(session_id)
        with sess.lock:
            sess.network.validate_evidence(body.assignments)
            sess.evidence = dict(body.assignments)
            return {"evidence": dict(sess.evidence)}

    @app.delete("/sessions/{session_id}/evidence")
    def clear_evidence(session_id: str):
        sess = get_session(session_id)
        with sess.lock:
            sess.evidence = {}
            return {"evidence": {}}

    @app.post("/sessions/{session_id}/query")
    def query(session_id: str, body: QueryBody):
        sess = get_session(session_id)
        with sess.lock:
            evidence = body.evidence if body.evidence is not None else dict(sess.evidence)
            value = posterior(sess.network, body.target, evidence)
            return {"target": body.target, "evidence": evidence, "posterior": value}

    @app.get("/sessions/{session_id}/marginals")
    def marginals(session_id: str):
        """Posterior of every state of every variable under the session evidence."""
        sess = get_session(session_id)
        with sess.lock:
            net, evidence = sess.network, dict(sess.evidence)
        out = {}
        for v in net.variables:
            if v.name in evidence:
                out[v.name] = {s: (1.0 if s == evidence[v.name] else 0.0) for s in v.values}
            else:
                out[v.name] = {s: posterior(net, {v.name: s}, evidence) for s in v.values}
        return {"evidence": evidence, "marginals": out}

    @app.post("/sessions/{session_id}/suggest/param")
    def suggest_param(session_id: str, body: ParamSuggestBody):
        sess = get_session(session_id)
        with sess.lock:
            net = sess.network
            constraint = constraint_of(sess, body)

            def work():
                solutions = []
                if body.param is not None:
                    solutions.append(solve_single_parameter(net, constraint, body.param.to_ref()))
                else:
                    for v in net.variables:
                        if not v.is_binary:
                            continue
                        for ref in net.cpt(v.name).refs():
                            try:
                                solutions.append(solve_single_parameter(net, constraint, ref))
                            except (SensitivityError, ModelError):
                                continue
                return solutions

            try:
                solutions = compute(work)
            except InfeasibleError as exc:
                return {
                    "constraint": payloads.constraint_payload(constraint),
                    "solutions": [],
                    "infeasible_reason": str(exc),
                }
            return {
                "constraint": payloads.constraint_payload(constraint),
                "solutions": [payloads.parameter_solution_payload(s) for s in solutions],
            }

    @app.post("/sessions/{session_id}/suggest/cpt")
    def suggest_cpt(session_id: str, body: CptSuggestBody):
        sess = get_session(session_id)
        with sess.lock:
            net = sess.network
            constraint = constraint_of(sess, body)
            report = alpha_single_cpt(net, constraint, body.variable)
            try:
                suggestion = compute(lambda: optimal_single_cpt(net, constraint, body.variable))
                payload = payloads.suggestion_payload(net, suggestion)
            except InfeasibleError as exc:
                payload = payloads.infeasible_payload(str(exc))
            return {
                "report": payloads.alpha_report_payload(net, report),
                "suggestion": payload,
            }

    @app.post("/sessions/{session_id}/suggest/two-cpt")
    def suggest_two_cpt(session_id: str, body: TwoCptSuggestBody):
        sess = get_session(session_id)
        with sess.lock:
            net = sess.network
            constraint = constraint_of(sess, body)
            report = alpha_two_cpt(net, constraint, body.variable_x, body.variable_y)
            try:
                suggestion = compute(
                    lambda: optimal_two_cpt(net, constraint, body.variable_x, body.variable_y)
                )
                payload = payloads.suggestion_payload(net, suggestion)
            except InfeasibleError as exc:
                payload = payloads.infeasible_payload(str(exc))
            return {
                "report": payloads.alpha_report_payload(net, report),
                "suggestion": payload,
            }

    @app.post("/sessions/{session_id}/relevance")
    def relevance(session_id: str, body: ConstraintBody):
        sess = get_session(session_id)
        with sess.lock:
            constraint = constraint_of(sess, body)
            ranked = compute(lambda: prune_candidate_cpts(sess.network, constraint))
            return payloads.relevance_payload(ranked)

    @app.post("/sessions/{session_id}/softev")
    def softev(session_id: str, body: SoftevBody):
        sess = get_session(session_id)
        with sess.lock:
            net = sess.network
            constraint = constraint_of(sess, body)
            try:
                augmented, _, result = compute(
                    lambda: design_soft_evidence(net, body.hosts, constraint)
                )
            except InfeasibleError as exc:
                return {"result": payloads.infeasible_payload(str(exc)), "attached": False}
            if body.attach:
                # Session gains the trivial sensors; the suggestion can then
                # be applied (and undone) like any other delta set.
                sess.history.append(((), net))
                sess.network, _ = attach_virtual_sensors(net, body.hosts)
            return {
                "result": payloads.softev_payload(result),
                "suggestion": payloads.suggestion_payload(augmented, result.suggestion),
                "attached": body.attach,
            }

    @app.post("/sessions/{session_id}/solution-space")
    def solution_space(session_id: str, body: SolutionSpaceBody):
        sess = get_session(session_id)
        with sess.lock:
            net = sess.network
            constraint = constraint_of(sess, body)
            if (body.cpt is None) == (body.two_cpt is None):
                raise HTTPException(status_code=400, detail="give exactly one of cpt or two_cpt")
            if body.cpt is not None:
                report = alpha_single_cpt(net, constraint, body.cpt)
            else:
                report = alpha_two_cpt(net, constraint, body.two_cpt[0], body.two_cpt[1])
            return payloads.solution_space_payload(net, report, body.samples)

    @app.post("/sessions/{session_id}/apply")
    def apply(session_id: str, body: ApplyBody):
        sess = get_session(session_id)
        with sess.lock:
            deltas = tuple(ParameterDelta(d.param.to_ref(), d.delta) for d in body.deltas)
            new_net = apply_deltas(sess.network, deltas)
            sess.history.append((deltas, sess.network))
            sess.network = new_net
            return {
                "network": payloads.network_summary(sess.network),
                "can_undo": True,
            }

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        sess = get_session(session_id)
        with sess.lock:
            if not sess.history:
                raise HTTPException(status_code=422, detail="nothing to undo")
            _, previous = sess.history.pop()
            sess.network = previous
            return {
                "network": payloads.network_summary(sess.network),
                "can_undo": bool(sess.history),
            }

    @app.put("/sessions/{session_id}/locks")
    def set_lock(session_id: str, body: LockBody):
        sess = get_session(session_id)
        with sess.lock:
            cpt = sess.network.cpt(body.param.variable)
            ref = cpt.canonical(body.param.to_ref())
            locks = set(cpt.locks)
            if body.locked:
                locks.add(ref)
            else:
                locks.discard(ref)
            sess.network = sess.network.with_cpt(body.param.variable, locks=frozenset(locks))
            return {"param": payloads.param_payload(ref), "locked": body.locked}

    @app.get("/bounds")
    def bounds(d: float, p: float | None = None, points: int = 101):
        return payloads.bounds_payload(d, p, points)

    if static_dir is None:
        default_static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = default_static if default_static.is_dir() else None
    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


app = create_app()
