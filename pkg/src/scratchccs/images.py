"""Project imagery: decoding costume assets and embedding them as vectors.

The default embedding is a small hand-rolled one (pooled thumbnail plus
color histograms) chosen for determinism, not for perceptual quality. Teams
with a CNN pipeline can export its vectors to CSV and load them through
``import_embeddings`` instead; everything downstream only sees vectors.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    ConfigError,
    DecodeError,
    DimensionMismatch,
    MissingEmbedding,
    NonFiniteValue,
)
from .ingest import RawProject
from .model import Project

BUILTIN_DIM = 240
_THUMB_SIDE = 8
_HIST_BINS = 16

RASTER_FORMATS = {"png", "jpg", "jpeg", "bmp", "gif"}


@dataclass(frozen=True)
class ImageRecord:
    """One decoded costume or backdrop image."""

    image_id: str
    project_id: str
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError("pixels must be an RGB raster")
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ValueError("image must have at least one pixel")


def decode_image(data: bytes) -> np.ndarray:
    """Decode raster bytes to an RGB array, flattening any alpha onto white."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            if img.mode in ("RGBA", "LA", "PA") or (
                img.mode == "P" and "transparency" in img.info
            ):
                rgba = img.convert("RGBA")
                background = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
                background.alpha_composite(rgba)
                return np.asarray(background.convert("RGB"), dtype=np.uint8)
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc


def collect_image_records(
    project: Project, raw: RawProject
) -> tuple[list[ImageRecord], list[str]]:
    """Decode every distinct raster costume of a project.

    Costumes shared between sprites are embedded once per project. Returns the
    records plus skip notes for vector or undecodable assets.
    """
    records: list[ImageRecord] = []
    skipped: list[str] = []
    seen: set[str] = set()
    for target in project.targets:
        for costume in target.costumes:
            if costume.asset_id in seen:
                continue
            seen.add(costume.asset_id)
            image_id = f"{project.project_id}:{costume.asset_id}"
            if costume.data_format not in RASTER_FORMATS:
                skipped.append(f"{image_id}: {costume.data_format} asset (no rasterizer)")
                continue
            data = raw.assets.get(costume.md5ext)
            if data is None:
                skipped.append(f"{image_id}: asset file {costume.md5ext} absent")
                continue
            try:
                pixels = decode_image(data)
            except DecodeError as exc:
                skipped.append(f"{image_id}: {exc}")
                continue
            records.append(ImageRecord(image_id=image_id, project_id=project.project_id, pixels=pixels))
    return records, skipped


def _pooled_thumbnail(pixels: np.ndarray) -> np.ndarray:
    """Adaptive 8x8 average pooling, per channel, scaled to [0, 1]."""
    h, w, _ = pixels.shape
    values = pixels.astype(np.float64)
    out = np.empty((_THUMB_SIDE, _THUMB_SIDE, 3), dtype=np.float64)
    for row in range(_THUMB_SIDE):
        y0 = (row * h) // _THUMB_SIDE
        y1 = max(y0 + 1, math.ceil(((row + 1) * h) / _THUMB_SIDE))
        for col in range(_THUMB_SIDE):
            x0 = (col * w) // _THUMB_SIDE
            x1 = max(x0 + 1, math.ceil(((col + 1) * w) / _THUMB_SIDE))
            out[row, col] = values[y0:y1, x0:x1].mean(axis=(0, 1))
    return out.reshape(-1) / 255.0


def _channel_histograms(pixels: np.ndarray) -> np.ndarray:
    """Three 16-bin histograms (R, G, B), each summing to 1."""
    n = pixels.shape[0] * pixels.shape[1]
    bins = (pixels >> 4).astype(np.int64)
    parts = []
    for channel in range(3):
        counts = np.bincount(bins[:, :, channel].reshape(-1), minlength=_HIST_BINS)
        parts.append(counts.astype(np.float64) / n)
    return np.concatenate(parts)


def embed_image_builtin(record: ImageRecord) -> np.ndarray:
    """240-dim embedding: 8x8 RGB thumbnail (192) + color histograms (48).

    Pure function of the pixel array; no resampling library involved, so the
    result is identical across platforms.
    """
    return np.concatenate([_pooled_thumbnail(record.pixels), _channel_histograms(record.pixels)])


@dataclass
class EmbeddingSet:
    dim: int
    vectors: dict[str, np.ndarray]
    backend: str  # builtin | imported

    def __post_init__(self) -> None:
        for image_id, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise DimensionMismatch(
                    f"{image_id}: vector has dim {vec.shape}, expected ({self.dim},)"
                )
            if not np.all(np.isfinite(vec)):
                raise NonFiniteValue(f"{image_id}: embedding contains NaN or Inf")


def embed_images_builtin(images: list[ImageRecord]) -> EmbeddingSet:
    return EmbeddingSet(
        dim=BUILTIN_DIM,
        vectors={rec.image_id: embed_image_builtin(rec) for rec in images},
        backend="builtin",
    )


def import_embeddings(path: str | Path, images: list[ImageRecord]) -> EmbeddingSet:
    """Load externally computed embeddings from `image_id,v0..v{d-1}` CSV.

    Every image passed in must have a row; extra rows are ignored. All rows
    must agree on dimension and contain only finite numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"embedding file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "image_id" or len(header) < 2:
            raise ConfigError(f"{path}: expected header 'image_id,v0..v{{d-1}}'")
        dim = len(header) - 1
        expected = [f"v{i}" for i in range(dim)]
        if [h.strip() for h in header[1:]] != expected:
            raise ConfigError(f"{path}: value columns must be named v0..v{dim - 1}")
        rows: dict[str, np.ndarray] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) - 1 != dim:
                raise DimensionMismatch(
                    f"{path}:{line_no}: row has {len(row) - 1} values, header promises {dim}"
                )
            try:
                vec = np.array([float(v) for v in row[1:]], dtype=np.float64)
            except ValueError as exc:
                raise ConfigError(f"{path}:{line_no}: non-numeric value") from exc
            if not np.all(np.isfinite(vec)):
                raise NonFiniteValue(f"{path}:{line_no}: embedding contains NaN or Inf")
            rows[row[0].strip()] = vec

    vectors: dict[str, np.ndarray] = {}
    missing = []
    for rec in images:
        vec = rows.get(rec.image_id)
        if vec is None:
            missing.append(rec.image_id)
        else:
            vectors[rec.image_id] = vec
    if missing:
        raise MissingEmbedding(f"no embedding row for: {', '.join(sorted(missing))}")
    return EmbeddingSet(dim=dim, vectors=vectors, backend="imported")
