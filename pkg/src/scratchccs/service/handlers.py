"""Request handlers, callable with or without a running server.

Each handler takes a request model and returns a response model, raising
domain or config errors for the caller to map (HTTP layer → status codes,
CLI → exit codes). The CLI invokes these directly when no server is
configured.
"""

from __future__ import annotations

from pathlib import Path

from .. import __version__
from ..ingest import MANIFEST_NAME, fetch_studio
from ..pipeline import RunConfig, compare_files, score_and_write
from .schemas import (
    CompareRequest,
    CompareResponse,
    FetchRequest,
    FetchResponse,
    HealthResponse,
    ScoreRequest,
    ScoreResponse,
)


def handle_fetch(request: FetchRequest) -> FetchResponse:
    manifest = fetch_studio(request.studio_id, request.dest, limit=request.limit)
    counts = manifest.counts()
    return FetchResponse(
        studio_id=request.studio_id,
        dest=request.dest,
        fetched=counts["fetched"],
        cached=counts["cached"],
        failed=counts["failed"],
        manifest_path=str(Path(request.dest) / MANIFEST_NAME),
    )


def handle_score(request: ScoreRequest) -> ScoreResponse:
    config = RunConfig(
        studio_dir=Path(request.studio_dir),
        output_dir=Path(request.output_dir),
        seed=request.seed,
        k_visual=request.k_visual,
        k_text=request.k_text,
        embedding=request.embedding,
        external_scores=Path(request.external_scores) if request.external_scores else None,
        top_k=request.top_k,
        text_granularity=request.text_granularity,
    )
    run, paths = score_and_write(config)
    return ScoreResponse(
        meta=run.meta(),
        scores=[c.to_dict() for c in run.cards_in_display_order()],
        files={name: str(p) for name, p in paths.items()},
        failures=run.failures,
    )


def handle_compare(request: CompareRequest) -> CompareResponse:
    report, out_path, table = compare_files(
        request.scores_path, request.external_path, top_k=request.top_k
    )
    return CompareResponse(
        report=report.to_dict(), table=table, comparison_path=str(out_path)
    )


def handle_health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)
