"""Request and response bodies of the HTTP API.

These mirror RunConfig and the pipeline result types; the service and the
CLI share them so that running locally and talking to a server give the same
shapes.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class FetchRequest(BaseModel):
    studio_id: str
    dest: str
    limit: int | None = Field(default=None, ge=1)


class FetchResponse(BaseModel):
    studio_id: str
    dest: str
    fetched: int
    cached: int
    failed: int
    manifest_path: str


class ScoreRequest(BaseModel):
    studio_dir: str
    output_dir: str
    seed: int = 42
    k_visual: int | None = None
    k_text: int | None = None
    embedding: str = "builtin"
    external_scores: str | None = None
    top_k: int = 5
    text_granularity: str = "project"


class ScoreResponse(BaseModel):
    meta: dict
    scores: list[dict]
    files: dict[str, str]
    failures: list[dict]


class CompareRequest(BaseModel):
    scores_path: str
    external_path: str
    top_k: int = 5


class CompareResponse(BaseModel):
    report: dict
    table: str
    comparison_path: str


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    error: str
    detail: str
