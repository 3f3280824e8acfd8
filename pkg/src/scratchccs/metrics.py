"""Originality, elaboration and combined creativity scoring.

All three dimensions are computed raw per project, then max-normalized over
the studio: Z is the studio maximum of each score, so values land in [0, 1]
and the top project of each dimension scores exactly 1. The combined score is
the max-normalized sum of the three normalized dimensions. Normalization is a
positive rescaling, so ranking is invariant to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .analysis import rank_projects
from .elements import Element, ElementBag, StudioIndex
from .errors import UnknownElement


@dataclass
class ScoreCard:
    """Raw and normalized scores of one project within its studio."""

    project_id: str
    originality_raw: float
    elaboration_raw: float
    textual_flex: int
    visual_flex: int
    flexibility_raw: float
    originality: float = 0.0
    elaboration: float = 0.0
    flexibility: float = 0.0
    ccs: float = 0.0
    rank_ccs: int = 0

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "originality_raw": self.originality_raw,
            "elaboration_raw": self.elaboration_raw,
            "textual_flex": self.textual_flex,
            "visual_flex": self.visual_flex,
            "flexibility_raw": self.flexibility_raw,
            "originality": self.originality,
            "elaboration": self.elaboration,
            "flexibility": self.flexibility,
            "ccs": self.ccs,
            "rank_ccs": self.rank_ccs,
        }


def uniqueness(element: Element, index: StudioIndex) -> float:
    """1 / df(e): the rarer an element is across the studio, the closer to 1."""
    df = index.df.get(element)
    if df is None:
        raise UnknownElement(f"element not indexed: {element}")
    return 1.0 / df


def originality_raw(bag: ElementBag, index: StudioIndex) -> float:
    """Sum of uniqueness over the project's distinct elements.

    Multiplicity within the project does not amplify the sum; using an element
    five times scores the same as using it once.
    """
    total = 0.0
    for element in bag.counts:
        df = index.df.get(element)
        if df is None:
            raise UnknownElement(f"element not indexed: {element}")
        total += 1.0 / df
    return total


def elaboration_raw(bag: ElementBag) -> float:
    """Total element occurrences over all seven categories, plus the script
    count and the max script depth, each with unit weight."""
    return float(bag.total_occurrences() + bag.script_count + bag.max_depth)


def flexibility_raw(tf: int, vf: int) -> float:
    """Sum of textual and visual cluster counts; normalized studio-wide later."""
    if tf < 0 or vf < 0:
        raise ValueError("flexibility components must be non-negative")
    return float(tf + vf)


def normalize_scores(raw: Sequence[float]) -> list[float]:
    """Divide by the studio maximum; an all-zero studio normalizes to zeros."""
    if not raw:
        raise ValueError("cannot normalize an empty score list")
    if any(v < 0 for v in raw):
        raise ValueError("raw scores must be non-negative")
    z = max(raw)
    if z == 0:
        return [0.0 for _ in raw]
    return [v / z for v in raw]


def assemble_scorecards(
    project_ids: Sequence[str],
    o_raw: Sequence[float],
    e_raw: Sequence[float],
    tf: Sequence[int],
    vf: Sequence[int],
) -> list[ScoreCard]:
    """Normalize the three raw dimensions, combine, and rank.

    Output order follows the input order; rank_ccs uses competition ranking on
    the combined score (ties share the smaller rank).
    """
    n = len(project_ids)
    if not (len(o_raw) == len(e_raw) == len(tf) == len(vf) == n):
        raise ValueError("score vectors must align with project_ids")
    f_raw = [flexibility_raw(t, v) for t, v in zip(tf, vf)]
    o_norm = normalize_scores(o_raw)
    e_norm = normalize_scores(e_raw)
    f_norm = normalize_scores(f_raw)
    ccs_raw = [o + e + f for o, e, f in zip(o_norm, e_norm, f_norm)]
    ccs_norm = normalize_scores(ccs_raw)
    ranks = rank_projects({pid: c for pid, c in zip(project_ids, ccs_norm)})
    return [
        ScoreCard(
            project_id=pid,
            originality_raw=orw,
            elaboration_raw=erw,
            textual_flex=t,
            visual_flex=v,
            flexibility_raw=frw,
            originality=o,
            elaboration=e,
            flexibility=f,
            ccs=c,
            rank_ccs=ranks[pid],
        )
        for pid, orw, erw, t, v, frw, o, e, f, c in zip(
            project_ids, o_raw, e_raw, tf, vf, f_raw, o_norm, e_norm, f_norm, ccs_norm
        )
    ]


def score_studio(
    bags: Sequence[ElementBag],
    index: StudioIndex,
    flexibility: Mapping[str, tuple[int, int]],
) -> list[ScoreCard]:
    """Score every project of a studio.

    ``flexibility`` maps project_id to (textual, visual) cluster counts;
    projects absent from the map score 0 on both.
    """
    ids = [bag.project_id for bag in bags]
    o_raw = [originality_raw(bag, index) for bag in bags]
    e_raw = [elaboration_raw(bag) for bag in bags]
    tf = [flexibility.get(pid, (0, 0))[0] for pid in ids]
    vf = [flexibility.get(pid, (0, 0))[1] for pid in ids]
    return assemble_scorecards(ids, o_raw, e_raw, tf, vf)
