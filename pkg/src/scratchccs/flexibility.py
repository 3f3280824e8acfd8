"""Visual and textual flexibility: cluster studio-wide, count per project.

Both modalities follow the same shape: pool items from every project in the
studio, cluster the pool once, then credit each project with the number of
distinct clusters its own items land in. A project with no items in a
modality scores 0 there rather than erroring; sparse studios are normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .images import EmbeddingSet, ImageRecord
from .kmeans import ClusterAssignment, default_k, kmeans
from .textual import TextDocument, tfidf_vectorize


@dataclass
class ModalityClustering:
    """Clustering of one modality's items plus the per-project counts."""

    modality: str  # visual | textual
    clusters: ClusterAssignment | None
    flexibility: dict[str, int]

    def dump(self) -> dict | None:
        if self.clusters is None:
            return None
        out = {"modality": self.modality}
        out.update(self.clusters.to_dict())
        return out


def cluster_images(embeddings: EmbeddingSet, k: int | None, seed: int) -> ClusterAssignment:
    """Cluster every embedded image in the studio; ids ordered for stability."""
    image_ids = sorted(embeddings.vectors)
    matrix = np.stack([embeddings.vectors[i] for i in image_ids])
    chosen_k = default_k(len(image_ids)) if k is None else k
    return kmeans(matrix, chosen_k, seed, item_ids=image_ids)


def visual_flexibility(
    project_id: str, images: list[ImageRecord], clusters: ClusterAssignment
) -> int:
    labels = {
        clusters.assignment[rec.image_id]
        for rec in images
        if rec.project_id == project_id and rec.image_id in clusters.assignment
    }
    return len(labels)


def studio_visual_flexibility(
    project_ids: list[str],
    images: list[ImageRecord],
    embeddings: EmbeddingSet,
    k: int | None,
    seed: int,
) -> ModalityClustering:
    if not embeddings.vectors:
        return ModalityClustering("visual", None, {pid: 0 for pid in project_ids})
    clusters = cluster_images(embeddings, k, seed)
    flexibility = {pid: visual_flexibility(pid, images, clusters) for pid in project_ids}
    return ModalityClustering("visual", clusters, flexibility)


def cluster_texts(docs: list[TextDocument], k: int | None, seed: int) -> ClusterAssignment:
    """Vectorize and cluster the nonempty documents, keyed by doc id."""
    nonempty = [d for d in docs if not d.empty]
    matrix, _ = tfidf_vectorize(nonempty)
    doc_ids = [d.doc_id for d in nonempty]
    chosen_k = default_k(len(doc_ids)) if k is None else k
    return kmeans(matrix, chosen_k, seed, item_ids=doc_ids)


def textual_flexibility(
    project_id: str, docs: list[TextDocument], clusters: ClusterAssignment
) -> int:
    labels = {
        clusters.assignment[doc.doc_id]
        for doc in docs
        if doc.project_id == project_id and not doc.empty and doc.doc_id in clusters.assignment
    }
    return len(labels)


def studio_textual_flexibility(
    project_ids: list[str],
    docs: list[TextDocument],
    k: int | None,
    seed: int,
) -> ModalityClustering:
    if not any(not d.empty for d in docs):
        return ModalityClustering("textual", None, {pid: 0 for pid in project_ids})
    clusters = cluster_texts(docs, k, seed)
    flexibility = {pid: textual_flexibility(pid, docs, clusters) for pid in project_ids}
    return ModalityClustering("textual", clusters, flexibility)
