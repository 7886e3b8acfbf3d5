"""HTTP facade: assessment, planning, and sequential sessions.

Endpoints: POST /assess, POST /plan, POST /sessions, GET /sessions/{id},
POST /sessions/{id}/advance, GET /healthz. Error bodies are always
{code, message, detail}. Schema violations map to 400, unknown sessions to
404, stale revisions to 409, and pipeline failures to 422.

Sessions persist as one JSON file per revision under the store directory,
so a restart loses nothing and the decision trail stays auditable.
"""
from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from typing import Annotated, Literal, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, ConfigDict, Field

from .data import parse_regional_csv
from .decision import DependencyModel, UtilitySpec, recommend
from .errors import PipelineError
from .fixtures import regional_dataset
from .fusion import IntegrationGrid, PriorSpec
from .logit import GaussianPrior
from .network import network_from_dict
from .pipeline import AssessmentConfig, StageOneCache, assess_from_inputs
from .sequential import (
    SequentialSession,
    advance,
    continuations,
    create_session,
    latest_recommendation,
    session_from_dict,
    session_to_dict,
)

Probability = Annotated[float, Field(ge=0.0, le=1.0)]
Bit = Annotated[int, Field(ge=0, le=1)]


class PriorDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["uniform", "beta"] = "uniform"
    a: Optional[float] = None
    b: Optional[float] = None


class PipelineConfigDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    seed: int = 1
    iterations: Annotated[int, Field(gt=0)] = 11000
    burnIn: Annotated[int, Field(ge=0)] = 1000
    samples: Annotated[int, Field(gt=0)] = 60
    window: Annotated[int, Field(gt=0)] = 5
    grid: Literal["coarse", "fine"] = "fine"
    step: Annotated[float, Field(gt=0.0, le=0.5)] = 0.001
    flatCurve: bool = False
    likelihoodScale: Annotated[float, Field(gt=0.0)] = 1.0
    likelihoodExponent: Annotated[float, Field(gt=0.0)] = 1.0


class AssessRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    link: Optional[str] = None
    regionalCsv: Optional[str] = None
    history: list[Bit] = []
    covariates: dict[str, float] = {}
    prior: PriorDoc = PriorDoc()
    likelihood: Literal["adversarial", "conventional"] = "adversarial"
    config: PipelineConfigDoc = PipelineConfigDoc()


class LinkDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    a: str
    b: str
    length_ratio: Annotated[float, Field(gt=0.0)]


class NetworkDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    nodes: list[str]
    links: list[LinkDoc]
    source: str
    sink: str


class ConditionalDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    link: str
    given: str
    p: Probability


class DependencyDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["independent", "conditional-chain"] = "independent"
    conditionals: list[ConditionalDoc] = []


class UtilityDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["binary", "length-penalty"] = "binary"
    x_util: Optional[Annotated[float, Field(gt=0.0)]] = None


class PlanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    network: NetworkDoc
    marginals: Optional[dict[str, Probability]] = None
    assessments: Optional[list[AssessRequest]] = None
    dependency: DependencyDoc = DependencyDoc()
    utility: UtilityDoc = UtilityDoc()


class SessionCreateRequest(PlanRequest):
    model_config = ConfigDict(extra="forbid")
    pocMode: Literal["upheld", "rejected"] = "upheld"
    wClear: Annotated[float, Field(gt=0.0)] = 1.0
    wIncident: Annotated[float, Field(gt=0.0)] = 1.0
    propagation: Literal["adjacent", "all-downstream"] = "adjacent"


class AdvanceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    revision: Annotated[int, Field(ge=1)]
    link: str
    outcome: Literal["clear", "incident"]
    wClear: Optional[Annotated[float, Field(gt=0.0)]] = None
    wIncident: Optional[Annotated[float, Field(gt=0.0)]] = None


def _prior_from_doc(doc: PriorDoc) -> PriorSpec:
    if doc.kind == "uniform":
        return PriorSpec()
    if doc.a is None or doc.b is None:
        raise ValueError("beta prior requires both a and b")
    return PriorSpec(kind="beta", a=doc.a, b=doc.b)


def _config_from_doc(doc: PipelineConfigDoc, prior: PriorSpec, likelihood: str) -> AssessmentConfig:
    grid = (
        IntegrationGrid.coarse()
        if doc.grid == "coarse"
        else IntegrationGrid.fine(step=doc.step)
    )
    return AssessmentConfig(
        likelihood_kind=likelihood,
        prior=prior,
        grid=grid,
        beta_prior=GaussianPrior(),
        iterations=doc.iterations,
        burn_in=doc.burnIn,
        seed=doc.seed,
        sample_count=doc.samples,
        window=doc.window,
        flat_curve=doc.flatCurve,
        likelihood_scale=doc.likelihoodScale,
        likelihood_exponent=doc.likelihoodExponent,
    )


class SessionStore:
    """File-per-revision session persistence with in-process serialization."""

    def __init__(self, directory: str):
        self.directory = directory
        self.lock = threading.Lock()
        os.makedirs(directory, exist_ok=True)

    def _session_dir(self, session_id: str) -> str:
        if not re.fullmatch(r"[A-Za-z0-9_-]+", session_id):
            raise KeyError(session_id)
        return os.path.join(self.directory, session_id)

    def save(self, session: SequentialSession):
        d = self._session_dir(session.session_id)
        os.makedirs(d, exist_ok=True)
        target = os.path.join(d, f"rev-{session.revision:06d}.json")
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(session_to_dict(session), fh, indent=2)
            os.replace(tmp, target)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)

    def revisions(self, session_id: str) -> list:
        d = self._session_dir(session_id)
        if not os.path.isdir(d):
            raise KeyError(session_id)
        revs = []
        for name in os.listdir(d):
            m = re.fullmatch(r"rev-(\d+)\.json", name)
            if m:
                revs.append(int(m.group(1)))
        if not revs:
            raise KeyError(session_id)
        return sorted(revs)

    def load_latest(self, session_id: str) -> SequentialSession:
        latest = self.revisions(session_id)[-1]
        d = self._session_dir(session_id)
        with open(os.path.join(d, f"rev-{latest:06d}.json"), encoding="utf-8") as fh:
            return session_from_dict(json.load(fh))


def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _session_doc(session: SequentialSession) -> dict:
    doc = session_to_dict(session)
    doc["continuations"] = continuations(session)
    doc["recommendation"] = latest_recommendation(session)
    return doc


def create_app(store_dir: str | None = None, cache: StageOneCache | None = None) -> FastAPI:
    """Build the service; store_dir defaults to a fresh temporary directory."""
    app = FastAPI(title="convoy route assessment service", docs_url=None, redoc_url=None)
    if store_dir is None:
        tmp = tempfile.TemporaryDirectory(prefix="convoy-sessions-")
        app.state.store_tmpdir = tmp
        store_dir = tmp.name
    store = SessionStore(store_dir)
    app.state.store = store
    app.state.cache = cache

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Stage1-Cache"],
    )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error(
            400,
            "schema_violation",
            "request body failed schema validation",
            detail=[
                {"location": [str(p) for p in e.get("loc", [])], "problem": e.get("msg", "")}
                for e in exc.errors()
            ],
        )

    @app.exception_handler(PipelineError)
    async def handle_pipeline(request: Request, exc: PipelineError):
        return _error(422, exc.code, str(exc))

    @app.exception_handler(ValueError)
    async def handle_value(request: Request, exc: ValueError):
        return _error(400, "invalid_input", str(exc))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/assess")
    def handle_assess(req: AssessRequest):
        data = (
            regional_dataset()
            if req.regionalCsv is None
            else parse_regional_csv(req.regionalCsv)
        )
        config = _config_from_doc(req.config, _prior_from_doc(req.prior), req.likelihood)
        assessment, cache_state = assess_from_inputs(
            data, req.covariates, req.history, config=config, link_id=req.link,
            cache=app.state.cache,
        )
        body = json.dumps(assessment.to_dict())
        return Response(
            content=body,
            media_type="application/json",
            headers={"X-Stage1-Cache": cache_state},
        )

    def _resolve_plan(req: PlanRequest):
        network = network_from_dict(req.network.model_dump())
        marginals = dict(req.marginals or {})
        for item in req.assessments or []:
            if item.link is None:
                raise ValueError("each inline assessment needs its link id")
            data = (
                regional_dataset()
                if item.regionalCsv is None
                else parse_regional_csv(item.regionalCsv)
            )
            config = _config_from_doc(item.config, _prior_from_doc(item.prior), item.likelihood)
            assessment, _ = assess_from_inputs(
                data, item.covariates, item.history, config=config, link_id=item.link,
                cache=app.state.cache,
            )
            marginals[item.link] = assessment.p_attack
        if not marginals:
            raise ValueError("plan request needs marginals or inline assessments")
        model = DependencyModel.from_dict(req.dependency.model_dump())
        utility = UtilitySpec(kind=req.utility.kind, x_util=req.utility.x_util)
        return network, marginals, model, utility

    @app.post("/plan")
    def handle_plan(req: PlanRequest):
        network, marginals, model, utility = _resolve_plan(req)
        result = recommend(network, marginals, model, utility)
        doc = result.to_dict()
        doc["marginals"] = marginals
        return doc

    @app.post("/sessions")
    def handle_create(req: SessionCreateRequest):
        network, marginals, model, utility = _resolve_plan(req)
        with store.lock:
            session = create_session(
                network,
                marginals,
                model,
                utility,
                poc_mode=req.pocMode,
                w_clear=req.wClear,
                w_incident=req.wIncident,
                propagation=req.propagation,
            )
            store.save(session)
        return _session_doc(session)

    @app.get("/sessions/{session_id}")
    def handle_get(session_id: str):
        try:
            session = store.load_latest(session_id)
        except KeyError:
            return _error(404, "not_found", f"no session {session_id!r}")
        return _session_doc(session)

    @app.post("/sessions/{session_id}/advance")
    def handle_advance(session_id: str, req: AdvanceRequest):
        with store.lock:
            try:
                session = store.load_latest(session_id)
            except KeyError:
                return _error(404, "not_found", f"no session {session_id!r}")
            if req.revision != session.revision:
                return _error(
                    409,
                    "revision_conflict",
                    f"session is at revision {session.revision}, request expected {req.revision}",
                    detail={"currentRevision": session.revision},
                )
            advance(session, req.link, req.outcome, w_clear=req.wClear, w_incident=req.wIncident)
            store.save(session)
        return _session_doc(session)

    return app


app = create_app(store_dir=os.environ.get("CONVOY_SESSION_DIR"))
