"""HTTP service wrapping the comparison engine.

JSON over REST, session oriented:

    POST   /sessions                        create from two pose documents
    GET    /sessions/{id}/report            full comparison report
    POST   /sessions/{id}/attributes        add a user-authored attribute
    GET    /sessions/{id}/animations/{sid}  correction animation by suggestion
    GET    /sessions/{id}/profile           transverse-plane profiles
    DELETE /sessions/{id}
    GET    /skeleton                        canonical skeleton document

Report and animation responses are the store's canonical bytes, so the HTTP
path and the CLI path return identical documents for identical inputs. The
studio frontend bundle, when built, is served under /studio.
"""
from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .comparison import ComparisonConfig
from .errors import (
    EngineError,
    MotionFormatError,
    PipelineError,
    UnknownSuggestionError,
)
from .pipeline import canonical_json
from .skeleton import DEFAULT_SKELETON
from .store import AttributeValidationError, SessionStore, UnknownSessionError

DEFAULT_STORE = "./runform-sessions"
DEFAULT_UI_DIR = "./frontend/dist"


class ConfigModel(BaseModel):
    threshold: float = 0.25
    rel_error_floor: float = Field(0.05, alias="relErrorFloor")

    model_config = {"populate_by_name": True}

    def to_engine(self) -> ComparisonConfig:
        return ComparisonConfig(threshold=self.threshold, rel_error_floor=self.rel_error_floor)


class CreateSessionRequest(BaseModel):
    sample: dict
    exemplar: dict
    config: ConfigModel | None = None
    attributes: list[dict] | None = None


class CreateSessionResponse(BaseModel):
    id: str


class DeleteResponse(BaseModel):
    deleted: bool


class SessionListResponse(BaseModel):
    sessions: list[str]


def _canonical_response(data: bytes) -> Response:
    return Response(content=data, media_type="application/json")


def _error_response(status: int, error: Exception) -> JSONResponse:
    if isinstance(error, AttributeValidationError):
        return JSONResponse(
            status_code=status,
            content={"errors": [{"field": i.field, "message": i.message} for i in error.issues]},
        )
    detail = {"error": str(error)}
    if isinstance(error, PipelineError):
        detail["stage"] = error.stage
    return JSONResponse(status_code=status, content=detail)


def create_app(store_path: str | Path | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    store_path = store_path or os.environ.get("RUNFORM_STORE", DEFAULT_STORE)
    ui_dir = Path(ui_dir or os.environ.get("RUNFORM_UI", DEFAULT_UI_DIR))
    store = SessionStore(store_path)
    app = FastAPI(title="runform", version="0.1.0")
    app.state.store = store

    @app.exception_handler(UnknownSessionError)
    async def _unknown_session(request, exc):
        return _error_response(404, exc)

    @app.exception_handler(UnknownSuggestionError)
    async def _unknown_suggestion(request, exc):
        return _error_response(404, exc)

    @app.exception_handler(AttributeValidationError)
    async def _bad_attribute(request, exc):
        return _error_response(422, exc)

    @app.exception_handler(MotionFormatError)
    async def _bad_motion(request, exc):
        return _error_response(422, exc)

    @app.exception_handler(PipelineError)
    async def _pipeline_failed(request, exc):
        return _error_response(422, exc)

    @app.exception_handler(EngineError)
    async def _engine_failed(request, exc):
        return _error_response(422, exc)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/skeleton")
    def skeleton() -> Response:
        return _canonical_response(canonical_json(DEFAULT_SKELETON.to_doc()))

    @app.post("/sessions", response_model=CreateSessionResponse)
    def create_session(req: CreateSessionRequest) -> CreateSessionResponse:
        cfg = req.config.to_engine() if req.config else None
        session_id = store.create(
            req.sample, req.exemplar, config=cfg, attributes=req.attributes
        )
        return CreateSessionResponse(id=session_id)

    @app.get("/sessions", response_model=SessionListResponse)
    def list_sessions() -> SessionListResponse:
        return SessionListResponse(sessions=store.list_sessions())

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str) -> Response:
        return _canonical_response(store.report_bytes(session_id))

    @app.get("/sessions/{session_id}/profile")
    def get_profile(session_id: str) -> Response:
        return _canonical_response(store.profile_bytes(session_id))

    @app.post("/sessions/{session_id}/attributes")
    def add_attribute(session_id: str, meta_doc: dict) -> Response:
        return _canonical_response(store.add_attribute(session_id, meta_doc))

    @app.get("/sessions/{session_id}/animations/{sid}")
    def get_animation(session_id: str, sid: str) -> Response:
        return _canonical_response(store.animation_bytes(session_id, sid))

    @app.delete("/sessions/{session_id}", response_model=DeleteResponse)
    def delete_session(session_id: str) -> DeleteResponse:
        store.delete(session_id)
        return DeleteResponse(deleted=True)

    if ui_dir.is_dir():
        app.mount("/studio", StaticFiles(directory=str(ui_dir), html=True), name="studio")

        @app.get("/")
        def index() -> RedirectResponse:
            return RedirectResponse(url="/studio/")

    return app
