"""FastAPI application: HTTP boundary over the handlers.

Error mapping is the one HTTP-specific policy here: configuration problems
are the caller's fault (400), domain failures mean the inputs could not be
processed (422). Everything else is left to FastAPI's defaults.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import TOOL_NAME, __version__
from ..errors import ConfigError, DomainError
from . import handlers
from .schemas import (
    CompareRequest,
    CompareResponse,
    FetchRequest,
    FetchResponse,
    HealthResponse,
    ScoreRequest,
    ScoreResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title=f"{TOOL_NAME} service", version=__version__)

    @app.exception_handler(ConfigError)
    async def config_error(_: Request, exc: ConfigError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.exception_handler(DomainError)
    async def domain_error(_: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(
            status_code=422, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return handlers.handle_health()

    @app.post("/fetch", response_model=FetchResponse)
    def fetch(request: FetchRequest) -> FetchResponse:
        return handlers.handle_fetch(request)

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest) -> ScoreResponse:
        return handlers.handle_score(request)

    @app.post("/compare", response_model=CompareResponse)
    def compare(request: CompareRequest) -> CompareResponse:
        return handlers.handle_compare(request)

    return app
