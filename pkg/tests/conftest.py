"""Shared fixtures: small hand-built projects with known counts."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from helpers import (
    block,
    chain,
    costume,
    png_bytes,
    png_bytes_with_tweak,
    project_doc,
    say_inputs,
    sound,
    target,
    write_sb3,
)

WAV_STUB = b"RIFF\x24\x00\x00\x00WAVEfmt "


@pytest.fixture
def tiny_maze_doc() -> dict:
    """2 targets, 7 blocks: a forever loop on the stage, a 4-block chain on a sprite."""
    stage_blocks = {
        "s1": block("event_whenflagclicked", next_id="s2", top_level=True),
        "s2": block("control_forever", parent="s1", inputs={"SUBSTACK": [2, "s3"]}),
        "s3": block("looks_nextbackdrop", parent="s2"),
    }
    sprite_blocks = {
        "c1": block("event_whenflagclicked", next_id="c2", top_level=True),
        "c2": block("motion_movesteps", parent="c1", next_id="c3", inputs={"STEPS": [1, [4, "10"]]}),
        "c3": block("motion_turnright", parent="c2", next_id="c4", inputs={"DEGREES": [1, [4, "15"]]}),
        "c4": block("looks_say", parent="c3", inputs=say_inputs("hello maze")),
    }
    return project_doc(
        target("Stage", is_stage=True, blocks=stage_blocks),
        target("Cat", blocks=sprite_blocks, costumes=[costume("cat", png_bytes((255, 255, 255)))]),
    )


@pytest.fixture
def nested_loops_doc() -> dict:
    """1 script, 4 blocks, depth 4: hat, repeat, repeat, say."""
    blocks = {
        "n1": block("event_whenflagclicked", next_id="n2", top_level=True),
        "n2": block(
            "control_repeat",
            parent="n1",
            inputs={"TIMES": [1, [6, "10"]], "SUBSTACK": [2, "n3"]},
        ),
        "n3": block(
            "control_repeat",
            parent="n2",
            inputs={"TIMES": [1, [6, "3"]], "SUBSTACK": [2, "n4"]},
        ),
        "n4": block("looks_say", parent="n3", inputs=say_inputs("hi")),
    }
    return project_doc(target("Looper", blocks=blocks))


@pytest.fixture
def elaboration_doc() -> dict:
    """7 input-free blocks in 2 scripts (depths 4 and 3), 1 costume."""
    blocks = {}
    blocks.update(chain("event_whenflagclicked", "looks_show", "looks_hide", "motion_ifonedgebounce"))
    blocks.update(chain("event_whenflagclicked", "looks_show", "looks_hide"))
    return project_doc(
        target("Solo", blocks=blocks, costumes=[costume("only", png_bytes((0, 0, 255)))])
    )


@pytest.fixture
def visual_contrast_studio(tmp_path: Path) -> Path:
    """Two 4-image projects: near-identical near-whites vs four distinct solids."""
    studio = tmp_path / "visual_contrast_studio"
    studio.mkdir()
    gray = (240, 240, 240)
    near_identical = [
        png_bytes(gray, size=(32, 32)),
        png_bytes_with_tweak(gray, (0, 0), (239, 240, 240), size=(32, 32)),
        png_bytes_with_tweak(gray, (31, 31), (241, 240, 240), size=(32, 32)),
        png_bytes_with_tweak(gray, (16, 16), (240, 239, 240), size=(32, 32)),
    ]
    distinct = [
        png_bytes((255, 255, 255), size=(32, 32)),
        png_bytes((255, 0, 0), size=(32, 32)),
        png_bytes((0, 255, 0), size=(32, 32)),
        png_bytes((0, 0, 255), size=(32, 32)),
    ]

    def build(project_id: str, images: list[bytes]) -> None:
        costumes = [costume(f"c{i}", data) for i, data in enumerate(images)]
        doc = project_doc(
            target("Painter", blocks=dict(chain("event_whenflagclicked")), costumes=costumes)
        )
        assets = {c["md5ext"]: data for c, data in zip(costumes, images)}
        write_sb3(studio, project_id, doc, assets)

    build("100", near_identical)
    build("200", distinct)
    return studio


def _oracle_alpha() -> tuple[dict, dict[str, bytes]]:
    white = png_bytes((255, 255, 255))
    pop = WAV_STUB + b"alpha-pop"
    white_costume = costume("white", white)
    pop_sound = sound("pop", pop)
    blocks = {
        "a1": block("event_whenflagclicked", next_id="a2", top_level=True),
        "a2": block("motion_movesteps", parent="a1", next_id="a3", inputs={"STEPS": [1, [4, "10"]]}),
        "a3": block("looks_say", parent="a2", inputs=say_inputs("hello world")),
        "a4": block(
            "event_whenkeypressed",
            next_id="a5",
            top_level=True,
            fields={"KEY_OPTION": ["space", None]},
        ),
        "a5": block("motion_changexby", parent="a4", inputs={"DX": [1, [4, "10"]]}),
    }
    doc = project_doc(
        target("A", blocks=blocks, costumes=[white_costume], sounds=[pop_sound]),
        extensions=["pen"],
        monitors=[{"id": "m1", "opcode": "data_variable", "params": {"VARIABLE": "score"}}],
    )
    return doc, {white_costume["md5ext"]: white, pop_sound["md5ext"]: pop}


def _oracle_beta() -> tuple[dict, dict[str, bytes]]:
    red = png_bytes((255, 0, 0))
    pop = WAV_STUB + b"alpha-pop"  # same bytes as alpha's sound: shared asset
    red_costume = costume("red", red)
    pop_sound = sound("pop", pop)
    blocks = {
        "b1": block("event_whenflagclicked", next_id="b2", top_level=True),
        "b2": block("looks_say", parent="b1", next_id="b3", inputs=say_inputs("hello world")),
        "b3": block(
            "event_broadcast",
            parent="b2",
            inputs={"BROADCAST_INPUT": [1, [11, "go", "bc1"]]},
        ),
        "b4": block(
            "event_whenbroadcastreceived",
            next_id="b5",
            top_level=True,
            fields={"BROADCAST_OPTION": ["go", "bc1"]},
        ),
        "b5": block(
            "data_setvariableto",
            parent="b4",
            inputs={"VALUE": [1, [10, "5"]]},
            fields={"VARIABLE": ["score", "var1"]},
        ),
    }
    doc = project_doc(target("B", blocks=blocks, costumes=[red_costume], sounds=[pop_sound]))
    return doc, {red_costume["md5ext"]: red, pop_sound["md5ext"]: pop}


def _oracle_gamma() -> tuple[dict, dict[str, bytes]]:
    white = png_bytes((255, 255, 255))  # same bytes as alpha's costume
    backdrop = costume("blank", white)
    blocks = {
        "g1": block("event_whenflagclicked", next_id="g2", top_level=True),
        "g2": block(
            "control_repeat",
            parent="g1",
            next_id="g4",
            inputs={"TIMES": [1, [6, "6"]], "SUBSTACK": [2, "g3"]},
        ),
        "g3": block("looks_say", parent="g2", inputs=say_inputs("bye")),
        "g4": block("procedures_call", parent="g2", proccode="jump %s", inputs={"ARG0": [1, [4, "7"]]}),
    }
    doc = project_doc(
        target("Stage", is_stage=True, costumes=[backdrop]),
        target("C", blocks=blocks),
        monitors=[{"id": "m1", "opcode": "data_variable", "params": {"VARIABLE": "score"}}],
    )
    return doc, {backdrop["md5ext"]: white}


@pytest.fixture
def oracle_docs() -> dict[str, tuple[dict, dict[str, bytes]]]:
    return {"alpha": _oracle_alpha(), "beta": _oracle_beta(), "gamma": _oracle_gamma()}


@pytest.fixture
def oracle_studio(tmp_path: Path, oracle_docs) -> Path:
    studio = tmp_path / "oracle_studio"
    studio.mkdir()
    for project_id, (doc, assets) in oracle_docs.items():
        write_sb3(studio, project_id, doc, assets)
    return studio


@pytest.fixture
def scored_oracle(oracle_studio: Path, tmp_path: Path):
    from scratchccs.pipeline import RunConfig, score_and_write

    config = RunConfig(studio_dir=oracle_studio, output_dir=tmp_path / "out", seed=42)
    return score_and_write(config)
