"""HTTP JSON API over frozen model snapshots.

Endpoints: POST /api/parse, POST /api/generate, GET /api/vocab,
GET /api/health.  Models are loaded once at startup and never mutated;
every request computes on its own tensors, so concurrent identical
requests return identical bodies.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import layout as lo
from . import pipeline
from . import postproc as pp
from . import texture as tx
from .autodiff import checkpoint_checksum
from .parsing import (
    MissingAttribute,
    ParseError,
    UnknownWord,
    UnparsableSentence,
    parse_house,
)
from .vocab import Vocabularies

DEFAULT_CHECKPOINT_DIR = os.environ.get("TEXTHOUSE_CHECKPOINTS", "checkpoints")


class ParseRequest(BaseModel):
    text: str


class GenerateRequest(BaseModel):
    text: str
    seed: int | None = None


def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _parse_error_response(exc: ParseError) -> JSONResponse:
    if isinstance(exc, UnparsableSentence):
        detail = {"sentence_index": exc.index, "sentence": exc.sentence}
    elif isinstance(exc, MissingAttribute):
        detail = {"room": exc.room, "kind": exc.kind}
    elif isinstance(exc, UnknownWord):
        detail = {"word": exc.word}
    else:
        detail = None
    return _error(400, type(exc).__name__, str(exc), detail)


def create_app(checkpoint_dir=None, vocab: Vocabularies | None = None) -> FastAPI:
    """Build the API app; models load from checkpoint_dir at startup.

    With missing checkpoints the app still starts but reports 503 from
    /api/health and 503 from /api/generate."""
    app = FastAPI(title="texthouse")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    state = {
        "vocab": vocab or Vocabularies(),
        "layout": None,
        "generator": None,
        "checksums": {},
    }
    app.state.models = state

    cdir = Path(checkpoint_dir or DEFAULT_CHECKPOINT_DIR)
    layout_path = cdir / "layout.params"
    gen_path = cdir / "generator.params"
    if layout_path.exists() and gen_path.exists():
        state["layout"] = lo.GcLpnParams.load(layout_path)
        state["generator"] = tx.GeneratorParams.load(gen_path)
        state["checksums"] = {
            "layout": checkpoint_checksum(layout_path),
            "generator": checkpoint_checksum(gen_path),
        }

    def ready() -> bool:
        return state["layout"] is not None and state["generator"] is not None

    @app.get("/api/health")
    def health():
        if not ready():
            return _error(503, "ModelsNotLoaded", "checkpoints are not loaded")
        return {"status": "ok", "checksums": state["checksums"]}

    @app.get("/api/vocab")
    def vocab_endpoint():
        v = state["vocab"]
        return {
            "room_types": list(v.room_types),
            "positions": list(v.positions),
            "materials": list(v.materials),
            "colours": list(v.colours),
        }

    @app.post("/api/parse")
    def parse_endpoint(req: ParseRequest):
        try:
            spec = parse_house(req.text, state["vocab"])
        except ParseError as exc:
            return _parse_error_response(exc)
        if not spec.rooms:
            return _error(400, "EmptyHouse", "no rooms found in the description")
        return spec.to_dict()

    @app.post("/api/generate")
    def generate_endpoint(req: GenerateRequest):
        if not ready():
            return _error(503, "ModelsNotLoaded", "checkpoints are not loaded")
        seed = pipeline.DEFAULT_SEED if req.seed is None else req.seed
        try:
            spec = parse_house(req.text, state["vocab"])
        except ParseError as exc:
            return _parse_error_response(exc)
        if not spec.rooms:
            return _error(400, "EmptyHouse", "no rooms found in the description")
        try:
            result = pipeline.run_generation(
                req.text, state["layout"], state["generator"], seed=seed,
                vocab=state["vocab"],
            )
        except (pp.NoLivingRoom, pp.DegenerateLayout, pp.SharedWallTooShort) as exc:
            return _error(422, type(exc).__name__, str(exc))
        return pipeline.result_to_api_dict(result)

    @app.exception_handler(Exception)
    def on_error(request: Request, exc: Exception):
        return _error(500, type(exc).__name__, str(exc))

    return app
