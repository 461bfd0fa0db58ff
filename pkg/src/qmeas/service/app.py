"""FastAPI application wrapping the simulation package."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..errors import ExperimentParseError, ExperimentValidationError, QmeasError
from . import handlers, schemas

try:
    from importlib.metadata import version as _pkg_version
    _VERSION = _pkg_version("qmeas")
except Exception:  # pragma: no cover - not installed
    _VERSION = "0.0.0"


def _error_body(kind: str, message: str) -> dict:
    return {"error": {"kind": kind, "message": message}}


def create_app() -> FastAPI:
    app = FastAPI(title="qmeas", version=_VERSION,
                  description="Projective/POVM measurement and channel simulator")

    @app.exception_handler(ExperimentParseError)
    async def _parse_error(request: Request, exc: ExperimentParseError):
        return JSONResponse(status_code=400, content=_error_body("parse", str(exc)))

    @app.exception_handler(ExperimentValidationError)
    async def _validation_error(request: Request, exc: ExperimentValidationError):
        return JSONResponse(status_code=422, content=_error_body("validation", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content=_error_body("validation", str(exc)))

    @app.exception_handler(QmeasError)
    async def _runtime_error(request: Request, exc: QmeasError):
        return JSONResponse(status_code=500, content=_error_body("runtime", str(exc)))

    @app.get("/health", response_model=schemas.HealthReport)
    def health():
        return {"status": "ok", "version": _VERSION}

    @app.post("/run", response_model=schemas.RunReport)
    def run(request: schemas.RunRequest):
        return handlers.handle_run(request.model_dump())

    @app.post("/validate", response_model=schemas.ValidationReport)
    def validate(request: schemas.ValidateRequest):
        return handlers.handle_validate(request.model_dump())

    @app.post("/qec", response_model=schemas.QecReport)
    def qec(request: schemas.QecRequest):
        return handlers.handle_qec(request.model_dump())

    @app.post("/usd", response_model=schemas.UsdReport)
    def usd(request: schemas.UsdRequest):
        return handlers.handle_usd(request.model_dump())

    @app.post("/channel", response_model=schemas.ChannelReport)
    def channel(request: schemas.ChannelRequest):
        return handlers.handle_channel(request.model_dump())

    return app


app = create_app()
