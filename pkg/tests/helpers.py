"""Builders for synthetic Scratch 3 projects and studios.

Everything here produces the real on-disk shapes (project.json documents,
sb3 zip archives, PNG assets) so tests exercise the same code paths as
downloaded studios.
"""

from __future__ import annotations

import hashlib
import io
import json
import zipfile
from pathlib import Path

from PIL import Image

_BLOCK_SEQ = 0


def block_id(prefix: str = "b") -> str:
    global _BLOCK_SEQ
    _BLOCK_SEQ += 1
    return f"{prefix}{_BLOCK_SEQ}"


def block(
    opcode: str,
    *,
    next_id: str | None = None,
    parent: str | None = None,
    inputs: dict | None = None,
    fields: dict | None = None,
    shadow: bool = False,
    top_level: bool = False,
    proccode: str | None = None,
) -> dict:
    doc = {
        "opcode": opcode,
        "next": next_id,
        "parent": parent,
        "inputs": inputs or {},
        "fields": fields or {},
        "shadow": shadow,
        "topLevel": top_level,
    }
    if proccode is not None:
        doc["mutation"] = {"tagName": "mutation", "proccode": proccode}
    return doc


def chain(*opcodes: str, inputs_per_block: list[dict | None] | None = None) -> dict[str, str | dict]:
    """A vertical stack of blocks; the first is top-level. Returns blocks dict."""
    ids = [block_id() for _ in opcodes]
    blocks: dict[str, dict] = {}
    for i, opcode in enumerate(opcodes):
        extra = (inputs_per_block or [None] * len(opcodes))[i]
        blocks[ids[i]] = block(
            opcode,
            next_id=ids[i + 1] if i + 1 < len(ids) else None,
            parent=ids[i - 1] if i > 0 else None,
            inputs=extra,
            top_level=(i == 0),
        )
    return blocks


def costume(name: str, data: bytes, fmt: str = "png") -> dict:
    digest = hashlib.md5(data).hexdigest()
    return {
        "name": name,
        "assetId": digest,
        "md5ext": f"{digest}.{fmt}",
        "dataFormat": fmt,
    }


def sound(name: str, data: bytes, fmt: str = "wav") -> dict:
    digest = hashlib.md5(data).hexdigest()
    return {
        "name": name,
        "assetId": digest,
        "md5ext": f"{digest}.{fmt}",
        "dataFormat": fmt,
    }


def target(
    name: str,
    *,
    is_stage: bool = False,
    blocks: dict | None = None,
    costumes: list[dict] | None = None,
    sounds: list[dict] | None = None,
) -> dict:
    return {
        "isStage": is_stage,
        "name": name,
        "blocks": blocks or {},
        "costumes": costumes or [],
        "sounds": sounds or [],
    }


def project_doc(
    *targets_: dict,
    extensions: list[str] | None = None,
    monitors: list[dict] | None = None,
) -> dict:
    if not any(t["isStage"] for t in targets_):
        targets_ = (target("Stage", is_stage=True),) + targets_
    return {
        "targets": list(targets_),
        "monitors": monitors or [],
        "extensions": extensions or [],
        "meta": {"semver": "3.0.0", "vm": "1.2.0", "agent": ""},
    }


def png_bytes(color: tuple[int, int, int], size: tuple[int, int] = (16, 16)) -> bytes:
    img = Image.new("RGB", size, color)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def png_bytes_with_tweak(
    color: tuple[int, int, int], pixel: tuple[int, int], pixel_color: tuple[int, int, int],
    size: tuple[int, int] = (16, 16),
) -> bytes:
    """Solid image with a single differing pixel, to vary the content hash."""
    img = Image.new("RGB", size, color)
    img.putpixel(pixel, pixel_color)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def sb3_bytes(doc: dict, assets: dict[str, bytes] | None = None) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("project.json", json.dumps(doc))
        for name, data in (assets or {}).items():
            zf.writestr(name, data)
    return buf.getvalue()


def write_sb3(dir_path: Path, project_id: str, doc: dict, assets: dict[str, bytes] | None = None) -> Path:
    path = Path(dir_path) / f"{project_id}.sb3"
    path.write_bytes(sb3_bytes(doc, assets))
    return path


def write_project_dir(
    dir_path: Path, project_id: str, doc: dict, assets: dict[str, bytes] | None = None
) -> Path:
    root = Path(dir_path) / project_id
    root.mkdir(parents=True)
    (root / "project.json").write_text(json.dumps(doc), encoding="utf-8")
    for name, data in (assets or {}).items():
        (root / name).write_bytes(data)
    return root


def say_inputs(message: str) -> dict:
    return {"MESSAGE": [1, [10, message]]}


def number_input(name: str, value: str) -> dict:
    return {name: [1, [4, value]]}
