"""Canonical element extraction across the seven project categories.

Every project decomposes into a multiset of elements, each tagged with one of
seven categories: blocks, costumes, sounds, monitors, arguments, action keys
and extensions. Canonical keys:

* block: the opcode string (orphan blocks included: they are still authored).
* costume / sound: the asset content hash, so identical bundled media counts
  as the same element across projects while user-made media stays unique.
* monitor: opcode plus its parameter list, serialized with sorted keys.
* argument: ``<kind>:<literal>`` for literal input values, and for field
  values not claimed by another category.
* action_key: the key literal from any KEY_OPTION field; kept out of the
  argument category to avoid double counting.
* extension: entries of the project's extensions list, plus each custom
  procedure's prototype signature.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .errors import DuplicateProjectId
from .model import LITERAL_KINDS, Project, Script, extract_scripts


class Category(str, Enum):
    BLOCK = "block"
    COSTUME = "costume"
    SOUND = "sound"
    MONITOR = "monitor"
    ARGUMENT = "argument"
    ACTION_KEY = "action_key"
    EXTENSION = "extension"


@dataclass(frozen=True)
class Element:
    category: Category
    key: str

    def __post_init__(self):
        if not self.key:
            raise ValueError("element key must be non-empty")

    def __str__(self) -> str:
        return f"{self.category.value}:{self.key}"


@dataclass
class ElementBag:
    """Per-project element occurrence counts plus script count and max depth."""

    project_id: str
    counts: dict[Element, int] = field(default_factory=dict)
    script_count: int = 0
    max_depth: int = 0

    def add(self, element: Element, n: int = 1) -> None:
        self.counts[element] = self.counts.get(element, 0) + n

    def total_occurrences(self) -> int:
        return sum(self.counts.values())

    def category_occurrences(self, category: Category) -> int:
        return sum(n for e, n in self.counts.items() if e.category is category)

    def distinct_count(self) -> int:
        return len(self.counts)


@dataclass
class StudioIndex:
    """Element document frequencies over one studio: df(e) = projects containing e."""

    project_ids: list[str]
    df: dict[Element, int]

    def size(self) -> int:
        return len(self.project_ids)


KEY_OPTION_FIELD = "KEY_OPTION"

# field names whose values already have a richer identity than a plain string
_FIELD_KINDS = {
    "BROADCAST_OPTION": "broadcast",
    "VARIABLE": "variable",
    "LIST": "list",
}


def monitor_key(opcode: str, params: dict[str, str]) -> str:
    serialized = ",".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{opcode}({serialized})"


def extract_elements(project: Project, scripts: list[Script] | None = None) -> ElementBag:
    """Build the element multiset of one parsed project.

    Occurrence counts are recorded, not distinct counts; a block used three
    times contributes three occurrences of one element. Deterministic: the
    same Project yields an identical bag, in identical insertion order.
    """
    if scripts is None:
        scripts = extract_scripts(project)
    bag = ElementBag(project_id=project.project_id)

    for target in project.targets:
        for block in target.blocks.values():
            if not block.shadow:
                bag.add(Element(Category.BLOCK, block.opcode))
                if block.proccode:
                    bag.add(Element(Category.EXTENSION, block.proccode))
                for iv in block.inputs.values():
                    if iv.kind in LITERAL_KINDS:
                        bag.add(Element(Category.ARGUMENT, f"{iv.kind}:{iv.value}"))
            # fields carry dropdown selections on both real and shadow blocks
            for name, value in block.fields.items():
                if not value:
                    continue
                if name == KEY_OPTION_FIELD:
                    bag.add(Element(Category.ACTION_KEY, value))
                else:
                    kind = _FIELD_KINDS.get(name, "string")
                    bag.add(Element(Category.ARGUMENT, f"{kind}:{value}"))
        for costume in target.costumes:
            bag.add(Element(Category.COSTUME, costume.asset_id))
        for sound in target.sounds:
            bag.add(Element(Category.SOUND, sound.asset_id))

    for monitor in project.monitors:
        bag.add(Element(Category.MONITOR, monitor_key(monitor.opcode, monitor.params)))
    for extension in project.extensions:
        if extension:
            bag.add(Element(Category.EXTENSION, extension))

    bag.script_count = len(scripts)
    bag.max_depth = max((s.depth for s in scripts), default=0)
    return bag


def build_studio_index(bags: list[ElementBag]) -> StudioIndex:
    """Document frequency of every element over a studio: presence, not multiplicity."""
    if not bags:
        raise ValueError("cannot index an empty list of bags")
    ids = [bag.project_id for bag in bags]
    duplicates = [pid for pid, n in Counter(ids).items() if n > 1]
    if duplicates:
        raise DuplicateProjectId(f"duplicate project ids: {sorted(duplicates)}")
    df: dict[Element, int] = {}
    for bag in bags:
        for element in bag.counts:
            df[element] = df.get(element, 0) + 1
    return StudioIndex(project_ids=ids, df=df)
