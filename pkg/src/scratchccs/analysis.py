"""Ranking and rank-correlation analysis against an external metric.

Kendall's tau is computed in the tie-corrected tau-b form, because external
computational-thinking scores are integer-valued and heavily tied. The
p-value uses the two-sided normal approximation for all sample sizes and is
flagged when n is small enough for that approximation to be rough.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, DegenerateInput, InsufficientOverlap

SMALL_SAMPLE_N = 10


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Tie-corrected Kendall rank correlation with a two-sided p-value.

    tau = (C - D) / sqrt((n0 - n1)(n0 - n2)) where C and D are the concordant
    and discordant pair counts, n0 = n(n-1)/2, and n1, n2 are the tied-pair
    counts within x and y. The p-value comes from the normal approximation of
    the distribution of C - D under independence, with tie-adjusted variance.
    """
    if len(x) != len(y):
        raise ValueError("inputs must be paired by index")
    n = len(x)
    if n < 2:
        raise ValueError("need at least two observations")
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise DegenerateInput("tau is undefined when either input is constant")

    sx = np.sign(xs[:, None] - xs[None, :])
    sy = np.sign(ys[:, None] - ys[None, :])
    iu = np.triu_indices(n, k=1)
    s = float((sx[iu] * sy[iu]).sum())  # C - D

    n0 = n * (n - 1) // 2
    tx = _tie_group_sizes(xs)
    ty = _tie_group_sizes(ys)
    n1 = sum(t * (t - 1) // 2 for t in tx)
    n2 = sum(t * (t - 1) // 2 for t in ty)
    denominator = math.sqrt(float(n0 - n1) * float(n0 - n2))
    if denominator == 0:
        raise DegenerateInput("tau is undefined: all pairs tied")
    tau = s / denominator

    # tie-adjusted variance of C - D under the null (Kendall 1970)
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(t * (t - 1) * (2 * t + 5) for t in ty)
    t1 = sum(t * (t - 1) for t in tx)
    u1 = sum(t * (t - 1) for t in ty)
    t2 = sum(t * (t - 1) * (t - 2) for t in tx)
    u2 = sum(t * (t - 1) * (t - 2) for t in ty)
    variance = (v0 - vt - vu) / 18.0 + (t1 * u1) / (2.0 * n * (n - 1))
    if n > 2:
        variance += (t2 * u2) / (9.0 * n * (n - 1) * (n - 2))
    if variance <= 0:
        return tau, 1.0
    z = s / math.sqrt(variance)
    p_value = math.erfc(abs(z) / math.sqrt(2.0))
    return tau, p_value


def _tie_group_sizes(values: np.ndarray) -> list[int]:
    _, counts = np.unique(values, return_counts=True)
    return [int(c) for c in counts if c > 1]


def rank_projects(scores: Mapping[str, float]) -> dict[str, int]:
    """Competition ranking, descending score: tied projects share the smaller
    rank and the next rank skips accordingly ("1224").

    The returned dict iterates in display order: by rank, then project id
    ascending within a tie.
    """
    if not scores:
        raise ValueError("cannot rank an empty score map")
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    ranks: dict[str, int] = {}
    current_rank = 0
    previous_score: float | None = None
    for position, (pid, score) in enumerate(ordered, start=1):
        if previous_score is None or score != previous_score:
            current_rank = position
            previous_score = score
        ranks[pid] = current_rank
    return ranks


@dataclass
class ExternalScores:
    """Scores imported from another metric, treated as opaque data."""

    metric_name: str
    scores: dict[str, float]


def load_external_scores(path: str | Path, metric_name: str | None = None) -> ExternalScores:
    """Read a ``project_id,score`` CSV of external metric scores."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"external scores file not found: {path}")
    scores: dict[str, float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["project_id", "score"]:
            raise ConfigError(f"{path}: expected header 'project_id,score'")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ConfigError(f"{path}:{line_no}: expected two columns")
            pid = row[0].strip()
            try:
                value = float(row[1])
            except ValueError as exc:
                raise ConfigError(f"{path}:{line_no}: score is not a number") from exc
            if not math.isfinite(value):
                raise ConfigError(f"{path}:{line_no}: score must be finite")
            if pid in scores:
                raise ConfigError(f"{path}:{line_no}: duplicate project id {pid}")
            scores[pid] = value
    return ExternalScores(metric_name=metric_name or path.stem, scores=scores)


@dataclass
class TopEntry:
    rank: int
    project_id: str
    cross_rank: int

    def to_dict(self) -> dict:
        return {"rank": self.rank, "project_id": self.project_id, "cross_rank": self.cross_rank}


@dataclass
class Disagreement:
    project_id: str
    rank_a: int
    rank_b: int
    delta: int

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "rank_a": self.rank_a,
            "rank_b": self.rank_b,
            "delta": self.delta,
        }


@dataclass
class ComparisonReport:
    """Two metrics over one studio: correlation, cross-rank tables, disagreements."""

    metric_a: str
    metric_b: str
    tau: float
    p_value: float
    n: int
    small_sample: bool
    top_a: list[TopEntry]
    top_b: list[TopEntry]
    disagreements: list[Disagreement]
    missing_in_a: list[str] = field(default_factory=list)
    missing_in_b: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "metric_a": self.metric_a,
            "metric_b": self.metric_b,
            "tau": self.tau,
            "p_value": self.p_value,
            "p_value_method": "normal approximation"
            + (" (rough: n < 10)" if self.small_sample else ""),
            "n": self.n,
            "top_a": [t.to_dict() for t in self.top_a],
            "top_b": [t.to_dict() for t in self.top_b],
            "disagreements": [d.to_dict() for d in self.disagreements],
            "missing_in_a": self.missing_in_a,
            "missing_in_b": self.missing_in_b,
        }


def compare_rankings(
    scores_a: Mapping[str, float],
    external: ExternalScores,
    k: int = 5,
    metric_a: str = "ccs",
) -> ComparisonReport:
    """Correlate two scorings of the same studio and build top-k cross tables.

    Restricted to the project-id intersection; projects scored by only one
    metric are listed, never imputed. The disagreement list holds the largest
    absolute rank differences.
    """
    common = sorted(set(scores_a) & set(external.scores))
    if len(common) < 2:
        raise InsufficientOverlap(
            f"only {len(common)} project(s) scored by both {metric_a} and {external.metric_name}"
        )
    x = [scores_a[pid] for pid in common]
    y = [external.scores[pid] for pid in common]
    tau, p_value = kendall_tau_b(x, y)

    ranks_a = rank_projects({pid: scores_a[pid] for pid in common})
    ranks_b = rank_projects({pid: external.scores[pid] for pid in common})
    top_a = [TopEntry(ranks_a[pid], pid, ranks_b[pid]) for pid in list(ranks_a)[:k]]
    top_b = [TopEntry(ranks_b[pid], pid, ranks_a[pid]) for pid in list(ranks_b)[:k]]

    deltas = sorted(
        (
            Disagreement(pid, ranks_a[pid], ranks_b[pid], abs(ranks_a[pid] - ranks_b[pid]))
            for pid in common
        ),
        key=lambda d: (-d.delta, d.project_id),
    )
    keep = max(k, 10)
    return ComparisonReport(
        metric_a=metric_a,
        metric_b=external.metric_name,
        tau=tau,
        p_value=p_value,
        n=len(common),
        small_sample=len(common) < SMALL_SAMPLE_N,
        top_a=top_a,
        top_b=top_b,
        disagreements=deltas[:keep],
        missing_in_a=sorted(set(external.scores) - set(scores_a)),
        missing_in_b=sorted(set(scores_a) - set(external.scores)),
    )


def render_comparison(report: ComparisonReport) -> str:
    """Human-readable cross-rank tables plus the correlation line."""
    lines = []
    width = max(
        [len(t.project_id) for t in report.top_a + report.top_b] + [len("project")]
    )

    def table(title: str, entries: list[TopEntry], cross_label: str) -> None:
        lines.append(title)
        lines.append(f"  {'rank':>4}  {'project':<{width}}  {cross_label}")
        for t in entries:
            lines.append(f"  {t.rank:>4}  {t.project_id:<{width}}  {t.cross_rank}")
        lines.append("")

    table(f"Top {len(report.top_a)} by {report.metric_a}:", report.top_a, f"{report.metric_b} rank")
    table(f"Top {len(report.top_b)} by {report.metric_b}:", report.top_b, f"{report.metric_a} rank")
    approx = " (normal approximation; rough for n < 10)" if report.small_sample else ""
    lines.append(f"Kendall tau-b = {report.tau:.4f}, p = {report.p_value:.4g}, n = {report.n}{approx}")
    return "\n".join(lines)
