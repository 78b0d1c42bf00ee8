"""HTTP API over the profiler and the document index."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .index import (
    DocumentIndex,
    DocumentIndexError,
    DuplicateDocumentError,
    UnknownLevelError,
    index_document,
)
from .profiler import Profiler, UnsupportedLanguageError

DEFAULT_MAX_BODY = 64 * 1024
DEFAULT_PORT = 8080


@dataclass(frozen=True)
class ApiError:
    status: int
    code: str
    message: str

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"error": {"status": self.status, "code": self.code, "message": self.message}},
        )


def _err(status: int, code: str, message: str) -> JSONResponse:
    return ApiError(status, code, message).response()


async def _read_json_body(request: Request, max_body: int):
    """Returns (parsed object, None) or (None, error response).

    The size check runs on raw bytes before parsing, so oversized garbage is
    413 rather than 400.
    """
    raw = await request.body()
    if len(raw) > max_body:
        return None, _err(413, "too_large", f"request body exceeds {max_body} bytes")
    try:
        body = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None, _err(400, "invalid_json", "request body is not valid JSON")
    if not isinstance(body, dict):
        return None, _err(400, "invalid_body", "request body must be a JSON object")
    return body, None


def _require_str(body: dict, key: str):
    value = body.get(key)
    if not isinstance(value, str):
        return None, _err(400, "invalid_body", f"field {key!r} must be a string")
    return value, None


def create_app(profiler: Profiler, index: DocumentIndex, max_body: int = DEFAULT_MAX_BODY) -> FastAPI:
    app = FastAPI(title="gramprof", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "http_error")
        return _err(exc.status_code, code, str(exc.detail))

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        return _err(500, "internal", f"{type(exc).__name__}: {exc}")

    @app.post("/v1/profile")
    async def profile(request: Request):
        body, err = await _read_json_body(request, max_body)
        if err is not None:
            return err
        text, err = _require_str(body, "text")
        if err is not None:
            return err
        lang, err = _require_str(body, "lang")
        if err is not None:
            return err
        threshold = body.get("threshold", 0.0)
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
            return _err(400, "invalid_body", "field 'threshold' must be a number")
        try:
            predictions = profiler.profile_text(text, lang, threshold=float(threshold))
        except UnsupportedLanguageError as e:
            return _err(422, "unsupported_language", str(e))
        return {"sentences": [p.as_dict() for p in predictions]}

    @app.post("/v1/documents")
    async def add_document(request: Request):
        body, err = await _read_json_body(request, max_body)
        if err is not None:
            return err
        doc_id, err = _require_str(body, "id")
        if err is not None:
            return err
        text, err = _require_str(body, "text")
        if err is not None:
            return err
        lang, err = _require_str(body, "lang")
        if err is not None:
            return err
        overwrite = body.get("overwrite", False)
        if not isinstance(overwrite, bool):
            return _err(400, "invalid_body", "field 'overwrite' must be a boolean")
        try:
            record = index_document(profiler, doc_id, text, lang)
            index.add(record, overwrite=overwrite)
        except UnsupportedLanguageError as e:
            return _err(422, "unsupported_language", str(e))
        except DuplicateDocumentError as e:
            return _err(409, "duplicate_id", str(e))
        except DocumentIndexError as e:
            return _err(422, "unprocessable", str(e))
        return {"document": record.summary()}

    @app.get("/v1/search")
    async def search(request: Request):
        gi = request.query_params.getlist("gi")
        level = request.query_params.get("level")
        lang = request.query_params.get("lang")
        try:
            hits = index.search(gi=gi or None, level=level, lang=lang)
        except UnknownLevelError as e:
            return _err(422, "unknown_level", str(e))
        return {"documents": [r.summary() for r in hits]}

    @app.get("/v1/tags")
    async def tags():
        return {"tags": list(profiler.inventory.tags)}

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "model": profiler.checksum}

    return app


def app_from_env() -> FastAPI:
    """Build the app from GRAMPROF_MODEL / GRAMPROF_INDEX / GRAMPROF_MAX_BODY."""
    model_dir = os.environ.get("GRAMPROF_MODEL")
    if not model_dir:
        raise RuntimeError("GRAMPROF_MODEL must point at a checkpoint directory")
    profiler = Profiler.from_dir(model_dir)
    index_path = os.environ.get("GRAMPROF_INDEX")
    if index_path and os.path.exists(index_path):
        index = DocumentIndex.load(index_path)
    else:
        index = DocumentIndex(profiler.levels) if profiler.levels else DocumentIndex()
    max_body = int(os.environ.get("GRAMPROF_MAX_BODY", DEFAULT_MAX_BODY))
    return create_app(profiler, index, max_body=max_body)


def run_service(
    profiler: Profiler,
    index: DocumentIndex,
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    max_body: int = DEFAULT_MAX_BODY,
) -> None:
    import uvicorn

    uvicorn.run(create_app(profiler, index, max_body=max_body), host=host, port=port, log_level="info")
