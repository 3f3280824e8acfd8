"""Studio acquisition: local .sb3 archives, unpacked project folders, and the
public Scratch web API.

An .sb3 file is a zip archive whose mandatory member is ``project.json``; every
other member is a media asset named by its md5 hash plus extension. The same
layout is used on disk for unpacked projects: ``<dir>/project.json`` plus
sibling asset files.
"""

from __future__ import annotations

import json
import zipfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import (
    ConfigError,
    CorruptArchive,
    EmptyStudio,
    InvalidUtf8,
    MissingProjectJson,
    StudioNotFound,
)

PROJECT_JSON = "project.json"
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class RawProject:
    """An unpacked project: id, raw JSON document bytes, and media assets by filename."""

    project_id: str
    project_json: bytes
    assets: dict[str, bytes] = field(default_factory=dict)


@dataclass
class FetchEntry:
    project_id: str
    title: str
    local_path: str
    status: str  # fetched | cached | failed

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "title": self.title,
            "local_path": self.local_path,
            "status": self.status,
        }


@dataclass
class FetchManifest:
    """Outcome of fetching one studio; failures are entries, not exceptions."""

    studio_id: str
    entries: list[FetchEntry]

    def counts(self) -> dict[str, int]:
        out = {"fetched": 0, "cached": 0, "failed": 0}
        for e in self.entries:
            out[e.status] = out.get(e.status, 0) + 1
        return out

    def to_dict(self) -> dict:
        return {
            "studio_id": self.studio_id,
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FetchManifest":
        return cls(
            studio_id=doc["studio_id"],
            entries=[FetchEntry(**e) for e in doc["entries"]],
        )


@dataclass(frozen=True)
class FetchSettings:
    """Remote endpoints, kept configurable because the Scratch API surface moves.

    ``project_url`` and ``asset_url`` are format strings; ``headers`` carries
    any required token header verbatim.
    """

    api_base: str = "https://api.scratch.mit.edu"
    project_url: str = "https://projects.scratch.mit.edu/{project_id}"
    asset_url: str = "https://assets.scratch.mit.edu/internalapi/asset/{asset}/get/"
    headers: dict[str, str] = field(default_factory=dict)
    page_size: int = 40
    timeout: float = 30.0


def read_sb3_archive(path: str | Path) -> RawProject:
    """Read one .sb3 zip archive into a RawProject.

    The project id is the file stem. Raises CorruptArchive on zip decode
    failure, MissingProjectJson if the mandatory member is absent, and
    InvalidUtf8 if project.json is not UTF-8 text.
    """
    path = Path(path)
    try:
        with zipfile.ZipFile(path) as zf:
            names = zf.namelist()
            if PROJECT_JSON not in names:
                raise MissingProjectJson(f"{path}: no {PROJECT_JSON} member")
            project_json = zf.read(PROJECT_JSON)
            assets = {
                name: zf.read(name)
                for name in names
                if name != PROJECT_JSON and not name.endswith("/")
            }
    except zipfile.BadZipFile as exc:
        raise CorruptArchive(f"{path}: {exc}") from exc
    _require_utf8(project_json, str(path))
    return RawProject(project_id=path.stem, project_json=project_json, assets=assets)


def read_project_dir(path: str | Path) -> RawProject:
    """Read an unpacked project folder (project.json plus sibling assets)."""
    path = Path(path)
    doc_path = path / PROJECT_JSON
    if not doc_path.is_file():
        raise MissingProjectJson(f"{path}: no {PROJECT_JSON} file")
    project_json = doc_path.read_bytes()
    _require_utf8(project_json, str(doc_path))
    assets = {
        p.name: p.read_bytes()
        for p in sorted(path.iterdir())
        if p.is_file() and p.name not in (PROJECT_JSON, MANIFEST_NAME)
    }
    return RawProject(project_id=path.name, project_json=project_json, assets=assets)


def _require_utf8(data: bytes, origin: str) -> None:
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidUtf8(f"{origin}: project.json is not UTF-8") from exc


def discover_studio(dir_path: str | Path) -> list[tuple[str, Path]]:
    """List (project_id, path) for every project in a studio directory.

    Projects are .sb3 files and immediate subdirectories containing a
    project.json; anything else is ignored. Order is a deterministic function
    of filenames: sorted by project id.
    """
    dir_path = Path(dir_path)
    if not dir_path.is_dir():
        raise ConfigError(f"studio directory does not exist: {dir_path}")
    found: list[tuple[str, Path]] = []
    for entry in dir_path.iterdir():
        if entry.is_file() and entry.suffix == ".sb3":
            found.append((entry.stem, entry))
        elif entry.is_dir() and (entry / PROJECT_JSON).is_file():
            found.append((entry.name, entry))
    found.sort(key=lambda item: item[0])
    return found


def load_raw_project(path: Path) -> RawProject:
    """Read one discovered project, archive or folder."""
    if path.is_dir():
        return read_project_dir(path)
    return read_sb3_archive(path)


def load_local_studio(dir_path: str | Path) -> list[RawProject]:
    """Load every project of a local studio directory, sorted by project id.

    Raises EmptyStudio when zero projects are found, which almost always means
    a misconfigured path.
    """
    found = discover_studio(dir_path)
    if not found:
        raise EmptyStudio(f"no projects found in {dir_path}")
    return [load_raw_project(path) for _, path in found]


def fetch_studio(
    studio_id: str,
    dest: str | Path,
    limit: int | None = None,
    settings: FetchSettings | None = None,
    client: httpx.Client | None = None,
    parallelism: int = 4,
) -> FetchManifest:
    """Download a studio's projects and assets into ``dest``.

    Pages through the studio roster, downloads each project's JSON document and
    the assets it references into ``dest/<project_id>/``, and skips projects
    already cached on disk. Download failures become ``failed`` manifest
    entries; only a missing studio aborts. The manifest is written to
    ``dest/manifest.json`` and its entries are ordered by project id.
    """
    settings = settings or FetchSettings()
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)

    own_client = client is None
    if client is None:
        client = httpx.Client(headers=settings.headers, timeout=settings.timeout)
    try:
        roster = _fetch_roster(studio_id, settings, client)
        if limit is not None:
            roster = roster[:limit]
        roster.sort(key=lambda item: item[0])
        if parallelism > 1 and len(roster) > 1:
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                entries = list(
                    pool.map(
                        lambda item: _fetch_one(item[0], item[1], dest, settings, client),
                        roster,
                    )
                )
        else:
            entries = [_fetch_one(pid, title, dest, settings, client) for pid, title in roster]
    finally:
        if own_client:
            client.close()

    entries.sort(key=lambda e: e.project_id)
    manifest = FetchManifest(studio_id=studio_id, entries=entries)
    manifest_path = dest / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    return manifest


def _fetch_roster(
    studio_id: str, settings: FetchSettings, client: httpx.Client
) -> list[tuple[str, str]]:
    """Page through the studio's project list; returns (project_id, title) pairs."""
    roster: list[tuple[str, str]] = []
    offset = 0
    while True:
        resp = client.get(
            f"{settings.api_base}/studios/{studio_id}/projects",
            params={"limit": settings.page_size, "offset": offset},
        )
        if resp.status_code == 404:
            raise StudioNotFound(f"studio {studio_id} not found")
        resp.raise_for_status()
        page = resp.json()
        for item in page:
            roster.append((str(item["id"]), str(item.get("title", ""))))
        if len(page) < settings.page_size:
            return roster
        offset += settings.page_size


def _fetch_one(
    project_id: str,
    title: str,
    dest: Path,
    settings: FetchSettings,
    client: httpx.Client,
) -> FetchEntry:
    project_dir = dest / project_id
    doc_path = project_dir / PROJECT_JSON
    if doc_path.is_file():
        return FetchEntry(project_id, title, str(project_dir), "cached")
    try:
        resp = client.get(settings.project_url.format(project_id=project_id))
        resp.raise_for_status()
        document = resp.content
        json.loads(document.decode("utf-8"))  # refuse to cache non-JSON payloads
    except Exception:
        return FetchEntry(project_id, title, str(project_dir), "failed")

    project_dir.mkdir(parents=True, exist_ok=True)
    doc_path.write_bytes(document)
    for asset in _referenced_assets(document):
        asset_path = project_dir / asset
        if asset_path.exists():
            continue
        try:
            resp = client.get(settings.asset_url.format(asset=asset))
            resp.raise_for_status()
            asset_path.write_bytes(resp.content)
        except Exception:
            # A missing asset degrades scoring of this project but does not
            # invalidate its code; the project stays fetched.
            continue
    return FetchEntry(project_id, title, str(project_dir), "fetched")


def _referenced_assets(document: bytes) -> list[str]:
    """md5+extension names referenced by a project document, deduplicated, in order."""
    try:
        doc = json.loads(document.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return []
    names: list[str] = []
    seen: set[str] = set()
    for target in doc.get("targets", []) or []:
        if not isinstance(target, dict):
            continue
        for kind in ("costumes", "sounds"):
            for item in target.get(kind, []) or []:
                if not isinstance(item, dict):
                    continue
                name = item.get("md5ext")
                if not name and item.get("assetId") and item.get("dataFormat"):
                    name = f"{item['assetId']}.{item['dataFormat']}"
                if name and name not in seen:
                    seen.add(name)
                    names.append(name)
    return names
