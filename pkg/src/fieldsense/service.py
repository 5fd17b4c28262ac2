"""Thin HTTP layer over a loaded model bundle.

The bundle is read-only and swapped atomically on reload, so concurrent
requests always observe one consistent model version. Prediction itself
runs in-process; this service exists for the demo UI.
"""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .artifact import load_bundle
from .builder import ModelBundle
from .errors import DataError, TargetError
from .suggest import SuggestionRequest, suggest


@dataclass(frozen=True)
class ServiceState:
    """One immutable model version; reload replaces the whole object."""

    bundle: ModelBundle
    fingerprint: str
    model_path: str


def _load_state(model_path: str | Path) -> ServiceState:
    path = Path(model_path)
    bundle = load_bundle(path)
    fingerprint = hashlib.sha256(path.read_bytes()).hexdigest()
    return ServiceState(bundle=bundle, fingerprint=fingerprint, model_path=str(path))


def create_app(model_path: str | Path) -> FastAPI:
    app = FastAPI(title="fieldsense", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.service = _load_state(model_path)

    @app.get("/health")
    def health():
        state: ServiceState = app.state.service
        return {"status": "ok", "model_fingerprint": state.fingerprint}

    @app.get("/schema")
    def schema():
        state: ServiceState = app.state.service
        return state.bundle.schema.to_dict()

    @app.post("/suggest")
    async def suggest_endpoint(request: Request):
        state: ServiceState = app.state.service
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body is not valid JSON") from None
        if not isinstance(body, dict) or "target" not in body:
            raise HTTPException(status_code=400, detail="body must contain 'target'")
        filled = body.get("filled", {})
        if not isinstance(filled, dict):
            raise HTTPException(status_code=400, detail="'filled' must be an object")
        try:
            req = SuggestionRequest(
                filled={str(k): v for k, v in filled.items()},
                target=str(body["target"]),
                theta=float(body.get("theta", 0.7)),
                top_percent=float(body.get("top_percent", 5.0)),
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None

        started = time.perf_counter()
        try:
            result = suggest(state.bundle, req)
        except TargetError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        latency_ms = (time.perf_counter() - started) * 1000.0
        return {**result.to_dict(), "latency_ms": latency_ms}

    @app.post("/reload")
    async def reload_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body is not valid JSON") from None
        model_path = body.get("model_path") if isinstance(body, dict) else None
        if not model_path:
            raise HTTPException(status_code=400, detail="body must contain 'model_path'")
        try:
            new_state = _load_state(model_path)
        except (DataError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        app.state.service = new_state  # single reference assignment: atomic swap
        return {"status": "reloaded", "model_fingerprint": new_state.fingerprint}

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"detail": f"internal error: {exc}"})

    return app


def run(model_path: str | Path, host: str = "127.0.0.1", port: int = 8040) -> None:
    import uvicorn

    uvicorn.run(create_app(model_path), host=host, port=port, log_level="warning")
