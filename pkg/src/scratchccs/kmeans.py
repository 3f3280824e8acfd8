"""Deterministic k-means (Lloyd's algorithm, k-means++ seeding).

Clustering feeds a published score, so runs must be reproducible bit for bit
across machines. That rules out library implementations with unspecified RNG
or thread-dependent reductions; this one pins the PRNG to a 64-bit LCG and
computes distances one centroid at a time so float accumulation order is
fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadK, DimensionMismatch

MAX_ITERATIONS = 300

# Knuth's MMIX multiplier/increment; full 64-bit modulus.
_LCG_MULT = 6364136223846793005
_LCG_INC = 1442695040888963407
_U64_MASK = (1 << 64) - 1


class Lcg64:
    """64-bit linear congruential generator. Small state, exact semantics."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _U64_MASK
        self._step()  # mix, so nearby seeds diverge immediately

    def _step(self) -> int:
        self.state = (self.state * _LCG_MULT + _LCG_INC) & _U64_MASK
        return self.state

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self._step() >> 11) / float(1 << 53)

    def next_below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return self._step() % n


@dataclass
class ClusterAssignment:
    k: int
    assignment: dict[str, int]
    centroids: list[list[float]]
    seed: int
    inertia: float = 0.0
    iterations: int = 0
    # within-cluster sum of squares after each assignment pass
    inertia_history: list[float] = field(default_factory=list)

    def labels_for(self, item_ids: list[str]) -> list[int]:
        return [self.assignment[i] for i in item_ids]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "assignment": dict(self.assignment),
        }


def default_k(n_items: int) -> int:
    """Rule-of-thumb cluster count: round(sqrt(n/2)), clamped to [2, 50]
    and never above the item count."""
    if n_items <= 0:
        raise BadK("cannot choose k for an empty item set")
    k = int(round((n_items / 2.0) ** 0.5))
    return min(n_items, max(2, min(50, k)))


def _distances_to(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff)


def _assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Label each point with its nearest centroid (squared Euclidean).

    One pass per centroid keeps summation order independent of k and of any
    BLAS tiling, and np.argmin resolves distance ties to the lowest index.
    """
    n = points.shape[0]
    k = centroids.shape[0]
    d2 = np.empty((n, k), dtype=np.float64)
    for j in range(k):
        d2[:, j] = _distances_to(points, centroids[j])
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(n), labels]


def _seed_centroids(points: np.ndarray, k: int, rng: Lcg64) -> np.ndarray:
    """k-means++: spread initial centroids by D^2-weighted sampling."""
    n = points.shape[0]
    chosen = [rng.next_below(n)]
    best_d2 = _distances_to(points, points[chosen[0]])
    while len(chosen) < k:
        total = float(best_d2.sum())
        if total <= 0.0:
            idx = rng.next_below(n)  # all remaining points sit on a centroid
        else:
            r = rng.next_float() * total
            idx = int(np.searchsorted(np.cumsum(best_d2), r, side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        best_d2 = np.minimum(best_d2, _distances_to(points, points[idx]))
    return points[chosen].copy()


def kmeans(
    vectors: list[list[float]] | np.ndarray,
    k: int,
    seed: int,
    item_ids: list[str] | None = None,
) -> ClusterAssignment:
    """Cluster vectors into k groups; identical inputs give identical output.

    Runs Lloyd's algorithm from a k-means++ start until assignments stop
    changing or 300 iterations pass. A cluster left empty by an update seizes
    the point currently farthest from its own centroid.
    """
    points = np.asarray(vectors, dtype=np.float64)
    if points.ndim != 2:
        raise DimensionMismatch("vectors must all share one dimension")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise BadK(f"k={k} outside [1, {n}]")
    if item_ids is None:
        item_ids = [str(i) for i in range(n)]
    elif len(item_ids) != n:
        raise ValueError("item_ids must pair with vectors")

    rng = Lcg64(seed)
    centroids = _seed_centroids(points, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    history: list[float] = []
    inertia = 0.0
    iterations = 0

    for iterations in range(1, MAX_ITERATIONS + 1):
        new_labels, d2 = _assign(points, centroids)
        inertia = float(d2.sum())
        history.append(inertia)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                centroids[j] = points[labels == j].mean(axis=0)
        seized: set[int] = set()
        for j in range(k):
            if counts[j] > 0:
                continue
            candidates = [i for i in range(n) if i not in seized and counts[labels[i]] > 1]
            if not candidates:
                candidates = [i for i in range(n) if i not in seized]
            far = max(candidates, key=lambda i: (d2[i], -i))
            centroids[j] = points[far]
            seized.add(far)

    return ClusterAssignment(
        k=k,
        assignment={item_ids[i]: int(labels[i]) for i in range(n)},
        centroids=[list(map(float, c)) for c in centroids],
        seed=seed,
        inertia=inertia,
        iterations=iterations,
        inertia_history=history,
    )
