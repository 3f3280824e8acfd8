"""End-to-end studio scoring: parse, index, cluster, score, write reports.

The orchestrator owns run configuration and file layout. Stages stay pure;
everything nondeterministic (RNG seed, k choices, embedding backend) is fixed
in the config and echoed into a `meta` block of every output file, so a
scores file always says how it was produced. No timestamps: rerunning with
the same inputs must give byte-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import TOOL_NAME, __version__
from .analysis import (
    ComparisonReport,
    compare_rankings,
    load_external_scores,
    render_comparison,
)
from .elements import ElementBag, build_studio_index, extract_elements
from .errors import ConfigError, DomainError, EmptyStudio
from .flexibility import (
    ModalityClustering,
    studio_textual_flexibility,
    studio_visual_flexibility,
)
from .images import ImageRecord, collect_image_records, embed_images_builtin, import_embeddings
from .ingest import discover_studio, load_raw_project
from .metrics import ScoreCard, score_studio
from .model import extract_scripts, parse_project
from .textual import GRANULARITY_ELEMENT, GRANULARITY_PROJECT, TextDocument, extract_text_documents

SCORES_JSON = "scores.json"
SCORES_CSV = "scores.csv"
CLUSTERS_JSON = "clusters.json"
DIAGNOSTICS_JSON = "diagnostics.json"
COMPARISON_JSON = "comparison.json"

CSV_COLUMNS = ["project_id", "O_raw", "E_raw", "Tf", "Vf", "F_raw", "O", "E", "F", "CCS", "rank"]

EMBEDDING_BUILTIN = "builtin"
_EMBEDDING_IMPORT_PREFIX = "import:"

_CONFIG_KEYS = {
    "studio_dir",
    "output_dir",
    "seed",
    "k_visual",
    "k_text",
    "embedding",
    "external_scores",
    "top_k",
    "text_granularity",
}


@dataclass
class RunConfig:
    """Everything that determines a scoring run's outputs."""

    studio_dir: Path
    output_dir: Path
    seed: int = 42
    k_visual: int | None = None
    k_text: int | None = None
    embedding: str = EMBEDDING_BUILTIN
    external_scores: Path | None = None
    top_k: int = 5
    text_granularity: str = GRANULARITY_PROJECT

    def __post_init__(self) -> None:
        self.studio_dir = Path(self.studio_dir)
        self.output_dir = Path(self.output_dir)
        if self.external_scores is not None:
            self.external_scores = Path(self.external_scores)
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        for label, k in (("k_visual", self.k_visual), ("k_text", self.k_text)):
            if k is not None and (not isinstance(k, int) or isinstance(k, bool) or k < 2):
                raise ConfigError(f"{label} must be an integer >= 2 when set")
        if not isinstance(self.top_k, int) or isinstance(self.top_k, bool) or self.top_k < 1:
            raise ConfigError("top_k must be a positive integer")
        if self.text_granularity not in (GRANULARITY_PROJECT, GRANULARITY_ELEMENT):
            raise ConfigError(
                f"text_granularity must be '{GRANULARITY_PROJECT}' or '{GRANULARITY_ELEMENT}'"
            )
        parse_embedding_spec(self.embedding)  # validates the syntax


def parse_embedding_spec(spec: str) -> tuple[str, Path | None]:
    """Split an embedding choice into (backend, import path)."""
    if spec == EMBEDDING_BUILTIN:
        return EMBEDDING_BUILTIN, None
    if spec.startswith(_EMBEDDING_IMPORT_PREFIX):
        raw = spec[len(_EMBEDDING_IMPORT_PREFIX) :]
        if not raw:
            raise ConfigError("embedding 'import:' needs a CSV path")
        return "imported", Path(raw)
    raise ConfigError(f"embedding must be 'builtin' or 'import:<path>', got {spec!r}")


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a JSON config; only RunConfig keys are legal."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        values = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = sorted(set(values) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config key(s): {', '.join(unknown)}")
    return values


def resolve_config(
    file_values: dict[str, Any] | None, overrides: dict[str, Any]
) -> RunConfig:
    """Merge config file values with CLI overrides; overrides win."""
    merged: dict[str, Any] = dict(file_values or {})
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    unknown = sorted(set(merged) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if "studio_dir" not in merged:
        raise ConfigError("studio_dir is required (flag --studio or config file)")
    if "output_dir" not in merged:
        raise ConfigError("output_dir is required (flag --out or config file)")
    return RunConfig(**merged)


@dataclass
class ScoreRun:
    """The in-memory result of scoring one studio."""

    config: RunConfig
    cards: list[ScoreCard]
    visual: ModalityClustering
    textual: ModalityClustering
    backend: str
    diagnostics: list[dict]
    failures: list[dict] = field(default_factory=list)
    skipped_images: list[str] = field(default_factory=list)
    comparison: ComparisonReport | None = None

    def meta(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "seed": self.config.seed,
            "k_visual": self.visual.clusters.k if self.visual.clusters else None,
            "k_text": self.textual.clusters.k if self.textual.clusters else None,
            "embedding": self.backend,
        }

    def cards_in_display_order(self) -> list[ScoreCard]:
        return sorted(self.cards, key=lambda c: (c.rank_ccs, c.project_id))


def run_score(config: RunConfig) -> ScoreRun:
    """Score a local studio directory.

    A project that fails to load or parse becomes a diagnostics entry; the
    rest of the studio is still scored. Only a studio with no usable project
    at all is an error.
    """
    if not config.studio_dir.is_dir():
        raise ConfigError(f"studio directory not found: {config.studio_dir}")
    entries = discover_studio(config.studio_dir)
    if not entries:
        raise EmptyStudio(f"no projects found under {config.studio_dir}")

    bags: list[ElementBag] = []
    images: list[ImageRecord] = []
    docs: list[TextDocument] = []
    diagnostics: list[dict] = []
    failures: list[dict] = []
    skipped_images: list[str] = []
    for project_id, path in entries:
        try:
            raw = load_raw_project(path)
            project = parse_project(raw)
            scripts = extract_scripts(project)
            bags.append(extract_elements(project, scripts))
            project_images, skips = collect_image_records(project, raw)
        except DomainError as exc:
            failures.append(
                {"project_id": project_id, "error": type(exc).__name__, "detail": str(exc)}
            )
            continue
        images.extend(project_images)
        skipped_images.extend(skips)
        docs.extend(extract_text_documents(project, config.text_granularity))
        diagnostics.append(project.diagnostics.to_dict())
    if not bags:
        raise EmptyStudio(
            f"none of the {len(entries)} project(s) under {config.studio_dir} could be parsed"
        )

    project_ids = [bag.project_id for bag in bags]
    backend, import_path = parse_embedding_spec(config.embedding)
    if backend == EMBEDDING_BUILTIN:
        embeddings = embed_images_builtin(images)
    else:
        embeddings = import_embeddings(import_path, images)

    visual = studio_visual_flexibility(project_ids, images, embeddings, config.k_visual, config.seed)
    textual = studio_textual_flexibility(project_ids, docs, config.k_text, config.seed)
    flex = {pid: (textual.flexibility[pid], visual.flexibility[pid]) for pid in project_ids}

    index = build_studio_index(bags)
    cards = score_studio(bags, index, flex)
    run = ScoreRun(
        config=config,
        cards=cards,
        visual=visual,
        textual=textual,
        backend=backend,
        diagnostics=diagnostics,
        failures=failures,
        skipped_images=skipped_images,
    )
    if config.external_scores is not None:
        external = load_external_scores(config.external_scores)
        run.comparison = compare_rankings(
            {c.project_id: c.ccs for c in cards}, external, k=config.top_k
        )
    return run


def _write_json(path: Path, payload: dict) -> None:
    try:
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _meta_comment(meta: dict) -> str:
    parts = " ".join(f"{k}={'none' if v is None else v}" for k, v in meta.items())
    return f"# meta {parts}"


def _csv_row(card: ScoreCard) -> str:
    cells = [
        card.project_id,
        str(card.originality_raw),
        str(card.elaboration_raw),
        str(card.textual_flex),
        str(card.visual_flex),
        str(card.flexibility_raw),
        str(card.originality),
        str(card.elaboration),
        str(card.flexibility),
        str(card.ccs),
        str(card.rank_ccs),
    ]
    return ",".join(cells)


def write_outputs(run: ScoreRun) -> dict[str, Path]:
    """Write scores, cluster dump, and diagnostics under the output dir."""
    out = run.config.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    meta = run.meta()
    ordered = run.cards_in_display_order()

    paths = {"scores_json": out / SCORES_JSON}
    _write_json(paths["scores_json"], {"meta": meta, "scores": [c.to_dict() for c in ordered]})

    lines = [_meta_comment(meta), ",".join(CSV_COLUMNS)]
    lines.extend(_csv_row(c) for c in ordered)
    paths["scores_csv"] = out / SCORES_CSV
    try:
        paths["scores_csv"].write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {paths['scores_csv']}: {exc}") from exc

    dumps = [d for d in (run.visual.dump(), run.textual.dump()) if d is not None]
    paths["clusters_json"] = out / CLUSTERS_JSON
    _write_json(paths["clusters_json"], {"meta": meta, "clusters": dumps})

    paths["diagnostics_json"] = out / DIAGNOSTICS_JSON
    _write_json(
        paths["diagnostics_json"],
        {
            "meta": meta,
            "projects": run.diagnostics,
            "failures": run.failures,
            "skipped_images": run.skipped_images,
        },
    )

    if run.comparison is not None:
        paths["comparison_json"] = out / COMPARISON_JSON
        _write_json(paths["comparison_json"], {"meta": meta, **run.comparison.to_dict()})
    return paths


def score_and_write(config: RunConfig) -> tuple[ScoreRun, dict[str, Path]]:
    run = run_score(config)
    return run, write_outputs(run)


def load_scores_file(path: str | Path) -> tuple[dict, dict[str, float]]:
    """Read a scores.json back; returns (meta, project_id -> CCS)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scores file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scores {path}: {exc}") from exc
    if not isinstance(payload, dict) or not isinstance(payload.get("scores"), list):
        raise ConfigError(f"{path}: not a scores file (missing 'scores' array)")
    ccs: dict[str, float] = {}
    for i, entry in enumerate(payload["scores"]):
        if not isinstance(entry, dict) or "project_id" not in entry or "ccs" not in entry:
            raise ConfigError(f"{path}: scores[{i}] lacks project_id/ccs")
        ccs[str(entry["project_id"])] = float(entry["ccs"])
    meta = payload.get("meta") if isinstance(payload.get("meta"), dict) else {}
    return meta, ccs


def compare_files(
    scores_path: str | Path, external_path: str | Path, top_k: int = 5
) -> tuple[ComparisonReport, Path, str]:
    """Compare a scores.json against an external metric CSV.

    Writes comparison.json next to the scores file and returns the report
    plus the rendered text table.
    """
    scores_path = Path(scores_path)
    meta, ccs = load_scores_file(scores_path)
    external = load_external_scores(external_path)
    report = compare_rankings(ccs, external, k=top_k)
    out_path = scores_path.parent / COMPARISON_JSON
    base_meta = meta or {"tool": TOOL_NAME, "version": __version__}
    _write_json(out_path, {"meta": base_meta, **report.to_dict()})
    return report, out_path, render_comparison(report)
