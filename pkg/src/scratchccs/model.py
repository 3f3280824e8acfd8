"""Typed model of a Scratch 3 project and script reconstruction.

A project document is one JSON object with a ``targets`` array (the stage plus
sprites). Each target owns a flat map of blocks; scripts are the trees hanging
off top-level blocks, linked through ``next`` pointers, substack inputs and
block-valued (reporter) inputs.

Shadow blocks are the dropdown menus rendered inside other blocks. They are
not authored code: they never count as block occurrences, never join scripts,
and never contribute to depth. Their selected values surface through element
extraction instead. Top-level entries stored as bare arrays (variable or list
reporters dropped onto the canvas) carry no opcode and are skipped entirely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import SchemaError, UnsupportedFormat
from .ingest import RawProject

# primitive input codes -> literal kind
_PRIMITIVE_KINDS = {
    4: "number",
    5: "number",
    6: "number",
    7: "number",
    8: "angle",
    9: "color",
    10: "string",
    11: "broadcast",
    12: "variable",
    13: "list",
}

LITERAL_KINDS = frozenset(_PRIMITIVE_KINDS.values())


@dataclass(frozen=True)
class InputValue:
    """One input slot: a reference to another block, a literal, or empty."""

    kind: str  # "block", "empty", or one of LITERAL_KINDS
    value: str | None = None


@dataclass
class Block:
    block_id: str
    opcode: str
    next_id: str | None
    parent_id: str | None
    inputs: dict[str, InputValue]
    fields: dict[str, str]
    shadow: bool
    top_level: bool
    proccode: str | None = None  # custom-procedure prototype signature


@dataclass
class Costume:
    name: str
    asset_id: str
    md5ext: str
    data_format: str


@dataclass
class Sound:
    name: str
    asset_id: str
    md5ext: str
    data_format: str


@dataclass
class Monitor:
    opcode: str
    params: dict[str, str]


@dataclass
class Target:
    name: str
    is_stage: bool
    blocks: dict[str, Block]
    costumes: list[Costume]
    sounds: list[Sound]


@dataclass
class ParseDiagnostics:
    """What had to be repaired or set aside while reading a project."""

    project_id: str
    orphan_blocks: list[str] = field(default_factory=list)
    dangling_refs: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "orphan_blocks": self.orphan_blocks,
            "dangling_refs": self.dangling_refs,
        }


@dataclass
class Project:
    project_id: str
    targets: list[Target]
    extensions: list[str]
    monitors: list[Monitor]
    diagnostics: ParseDiagnostics


@dataclass
class Script:
    """A tree of blocks rooted at a top-level block of one target."""

    target: str
    root: str
    block_ids: list[str]
    depth: int


def canonical_literal(value) -> str | None:
    """Stable text form of a JSON literal; numeric forms of the same value agree."""
    if value is None:
        return None
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def parse_project(raw: RawProject) -> Project:
    """Parse a raw project document into the typed model.

    Raises UnsupportedFormat for non-Scratch-3 documents and SchemaError (with
    a JSON path) for structurally malformed ones. Dangling block references
    are nulled out and reported in the diagnostics rather than silently
    dropped; cycles through next/input edges are rejected outright.
    """
    try:
        doc = json.loads(raw.project_json.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{raw.project_id}: project.json is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{raw.project_id}: document root is not an object")
    if "targets" not in doc:
        if "objName" in doc:
            raise UnsupportedFormat(
                f"{raw.project_id}: Scratch 2 document (objName present); only Scratch 3 is supported"
            )
        raise UnsupportedFormat(f"{raw.project_id}: no 'targets' key; not a Scratch 3 project")

    targets_doc = doc["targets"]
    if not isinstance(targets_doc, list) or not targets_doc:
        raise SchemaError(f"{raw.project_id}: targets must be a non-empty array")

    diagnostics = ParseDiagnostics(project_id=raw.project_id)
    targets: list[Target] = []
    seen_names: set[str] = set()
    for t_index, target_doc in enumerate(targets_doc):
        path = f"targets[{t_index}]"
        if not isinstance(target_doc, dict):
            raise SchemaError(f"{raw.project_id}: {path} is not an object")
        name = target_doc.get("name")
        if not isinstance(name, str) or not name:
            raise SchemaError(f"{raw.project_id}: {path}.name missing or empty")
        if name in seen_names:
            raise SchemaError(f"{raw.project_id}: duplicate target name {name!r}")
        seen_names.add(name)
        target = Target(
            name=name,
            is_stage=bool(target_doc.get("isStage", False)),
            blocks=_parse_blocks(raw.project_id, path, target_doc.get("blocks", {})),
            costumes=_parse_media(raw.project_id, f"{path}.costumes", target_doc.get("costumes"), Costume),
            sounds=_parse_media(raw.project_id, f"{path}.sounds", target_doc.get("sounds"), Sound),
        )
        _resolve_references(raw.project_id, path, target, diagnostics)
        _reject_cycles(raw.project_id, path, target)
        targets.append(target)

    return Project(
        project_id=raw.project_id,
        targets=targets,
        extensions=[str(e) for e in doc.get("extensions", []) or []],
        monitors=_parse_monitors(raw.project_id, doc.get("monitors")),
        diagnostics=diagnostics,
    )


def _parse_blocks(project_id: str, path: str, blocks_doc) -> dict[str, Block]:
    if blocks_doc is None:
        return {}
    if not isinstance(blocks_doc, dict):
        raise SchemaError(f"{project_id}: {path}.blocks is not an object")
    blocks: dict[str, Block] = {}
    for block_id, entry in blocks_doc.items():
        if isinstance(entry, list):
            # top-level inline reporter ([12, name, id, x, y]); no opcode, no code
            continue
        bpath = f"{path}.blocks[{block_id!r}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{project_id}: {bpath} is neither object nor array")
        opcode = entry.get("opcode")
        if not isinstance(opcode, str) or not opcode:
            raise SchemaError(f"{project_id}: {bpath}.opcode missing")
        inputs_doc = entry.get("inputs", {})
        if not isinstance(inputs_doc, dict):
            raise SchemaError(f"{project_id}: {bpath}.inputs is not an object")
        fields_doc = entry.get("fields", {})
        if not isinstance(fields_doc, dict):
            raise SchemaError(f"{project_id}: {bpath}.fields is not an object")

        inputs = {
            name: _parse_input(project_id, f"{bpath}.inputs[{name!r}]", value)
            for name, value in inputs_doc.items()
        }
        fields: dict[str, str] = {}
        for name, value in fields_doc.items():
            literal = canonical_literal(value[0] if isinstance(value, list) and value else value)
            if literal is not None:
                fields[name] = literal

        mutation = entry.get("mutation")
        proccode = None
        if isinstance(mutation, dict) and isinstance(mutation.get("proccode"), str):
            proccode = mutation["proccode"]

        next_id = entry.get("next")
        parent_id = entry.get("parent")
        blocks[block_id] = Block(
            block_id=block_id,
            opcode=opcode,
            next_id=next_id if isinstance(next_id, str) else None,
            parent_id=parent_id if isinstance(parent_id, str) else None,
            inputs=inputs,
            fields=fields,
            shadow=bool(entry.get("shadow", False)),
            top_level=bool(entry.get("topLevel", parent_id is None)),
            proccode=proccode,
        )
    return blocks


def _parse_input(project_id: str, path: str, value) -> InputValue:
    """Decode one input array ``[shadow_code, value, obscured?]``.

    Only the active value (index 1) matters; an obscured shadow's default at
    index 2 is what the user replaced, so it is never extracted.
    """
    if value is None:
        return InputValue("empty")
    if not isinstance(value, list) or not value:
        raise SchemaError(f"{project_id}: {path} is not an input array")
    inner = value[1] if len(value) > 1 else None
    if inner is None:
        return InputValue("empty")
    if isinstance(inner, str):
        return InputValue("block", inner)
    if isinstance(inner, list):
        if not inner:
            return InputValue("empty")
        kind = _PRIMITIVE_KINDS.get(inner[0] if isinstance(inner[0], int) else -1)
        if kind is None:
            raise SchemaError(f"{project_id}: {path} has unknown primitive code {inner[0]!r}")
        literal = canonical_literal(inner[1]) if len(inner) > 1 else None
        if literal is None or literal == "":
            return InputValue("empty")
        return InputValue(kind, literal)
    raise SchemaError(f"{project_id}: {path} has unsupported value {inner!r}")


def _parse_media(project_id: str, path: str, items, cls):
    if items is None:
        return []
    if not isinstance(items, list):
        raise SchemaError(f"{project_id}: {path} is not an array")
    out = []
    for index, item in enumerate(items):
        if not isinstance(item, dict):
            raise SchemaError(f"{project_id}: {path}[{index}] is not an object")
        md5ext = str(item.get("md5ext", "") or "")
        asset_id = str(item.get("assetId", "") or "")
        if not asset_id and md5ext:
            asset_id = md5ext.split(".", 1)[0]
        data_format = str(item.get("dataFormat", "") or "")
        if not data_format and "." in md5ext:
            data_format = md5ext.rsplit(".", 1)[1]
        if not asset_id:
            raise SchemaError(f"{project_id}: {path}[{index}] has neither assetId nor md5ext")
        if not md5ext and data_format:
            md5ext = f"{asset_id}.{data_format}"
        out.append(
            cls(
                name=str(item.get("name", "")),
                asset_id=asset_id,
                md5ext=md5ext,
                data_format=data_format.lower(),
            )
        )
    return out


def _parse_monitors(project_id: str, monitors_doc) -> list[Monitor]:
    if monitors_doc is None:
        return []
    if not isinstance(monitors_doc, list):
        raise SchemaError(f"{project_id}: monitors is not an array")
    monitors = []
    for index, item in enumerate(monitors_doc):
        if not isinstance(item, dict):
            raise SchemaError(f"{project_id}: monitors[{index}] is not an object")
        opcode = str(item.get("opcode", "") or "")
        if not opcode:
            continue  # malformed monitor entries carry no identity worth counting
        params_doc = item.get("params") or {}
        params = {}
        if isinstance(params_doc, dict):
            for key, value in params_doc.items():
                literal = canonical_literal(value)
                if literal is not None:
                    params[str(key)] = literal
        monitors.append(Monitor(opcode=opcode, params=params))
    return monitors


def _resolve_references(
    project_id: str, path: str, target: Target, diagnostics: ParseDiagnostics
) -> None:
    """Null out next/parent/input references to absent blocks, recording each one."""
    blocks = target.blocks
    for block in blocks.values():
        bpath = f"{path}.blocks[{block.block_id!r}]"
        if block.next_id is not None and block.next_id not in blocks:
            diagnostics.dangling_refs.append(f"{bpath}.next -> {block.next_id}")
            block.next_id = None
        if block.parent_id is not None and block.parent_id not in blocks:
            diagnostics.dangling_refs.append(f"{bpath}.parent -> {block.parent_id}")
            block.parent_id = None
        for name, iv in block.inputs.items():
            if iv.kind == "block" and iv.value not in blocks:
                diagnostics.dangling_refs.append(f"{bpath}.inputs[{name!r}] -> {iv.value}")
                block.inputs[name] = InputValue("empty")


def _block_children(block: Block, blocks: dict[str, Block]) -> list[str]:
    """Successor block ids along next and input edges, shadows excluded."""
    children: list[str] = []
    for iv in block.inputs.values():
        if iv.kind == "block":
            child = blocks.get(iv.value)
            if child is not None and not child.shadow:
                children.append(iv.value)
    if block.next_id is not None:
        nxt = blocks.get(block.next_id)
        if nxt is not None and not nxt.shadow:
            children.append(block.next_id)
    return children


def _reject_cycles(project_id: str, path: str, target: Target) -> None:
    """DFS coloring over next/input edges; a back edge is a malformed document."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {bid: WHITE for bid in target.blocks}
    for start in target.blocks:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            bid, child_index = stack[-1]
            children = _block_children(target.blocks[bid], target.blocks)
            if child_index < len(children):
                stack[-1] = (bid, child_index + 1)
                child = children[child_index]
                if color[child] == GRAY:
                    raise SchemaError(
                        f"{project_id}: {path}.blocks[{child!r}] is part of a reference cycle"
                    )
                if color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, 0))
            else:
                color[bid] = BLACK
                stack.pop()


def script_max_depth(root_id: str, blocks: dict[str, Block]) -> int:
    """Length in blocks of the longest root-to-leaf path.

    Edges are next links, substack entries and block-valued inputs, so nested
    reporters count as path nodes. A linear chain of n blocks has depth n.
    """
    memo: dict[str, int] = {}
    stack: list[tuple[str, bool]] = [(root_id, False)]
    while stack:
        bid, expanded = stack.pop()
        if expanded:
            children = _block_children(blocks[bid], blocks)
            memo[bid] = 1 + max((memo[c] for c in children), default=0)
            continue
        if bid in memo:
            continue
        stack.append((bid, True))
        for child in _block_children(blocks[bid], blocks):
            if child not in memo:
                stack.append((child, False))
    return memo[root_id]


def extract_scripts(project: Project) -> list[Script]:
    """Reconstruct scripts: one per top-level non-shadow block of each target.

    Every block belongs to at most one script; unreachable non-top-level
    blocks are excluded and recorded as orphans in the project diagnostics.
    """
    scripts: list[Script] = []
    orphans: list[str] = []
    for target in project.targets:
        blocks = target.blocks
        roots = sorted(
            bid for bid, b in blocks.items() if b.top_level and not b.shadow
        )
        claimed: set[str] = set()
        for root in roots:
            if root in claimed:
                continue
            members = _collect_subtree(root, blocks, claimed)
            scripts.append(
                Script(
                    target=target.name,
                    root=root,
                    block_ids=members,
                    depth=script_max_depth(root, blocks),
                )
            )
        for bid in sorted(blocks):
            if bid not in claimed and not blocks[bid].shadow:
                orphans.append(f"{target.name}/{bid}")
    project.diagnostics.orphan_blocks = orphans
    return scripts


def _collect_subtree(root: str, blocks: dict[str, Block], claimed: set[str]) -> list[str]:
    """Preorder walk from ``root``; blocks already claimed by another script stay there."""
    members: list[str] = []
    stack = [root]
    while stack:
        bid = stack.pop()
        if bid in claimed:
            continue
        claimed.add(bid)
        members.append(bid)
        stack.extend(reversed(_block_children(blocks[bid], blocks)))
    return members
