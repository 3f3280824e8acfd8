"""Reading local studios and fetching remote ones (mocked transport)."""

from __future__ import annotations

import json
import zipfile

import httpx
import pytest

from helpers import costume, png_bytes, project_doc, sb3_bytes, target, write_project_dir, write_sb3
from scratchccs.errors import (
    CorruptArchive,
    EmptyStudio,
    InvalidUtf8,
    MissingProjectJson,
    StudioNotFound,
)
from scratchccs.ingest import (
    FetchManifest,
    FetchSettings,
    discover_studio,
    fetch_studio,
    load_local_studio,
    read_project_dir,
    read_sb3_archive,
)


def test_read_sb3_archive_takes_id_from_filename(tmp_path):
    doc = project_doc(target("S"))
    path = write_sb3(tmp_path, "314", doc, assets={"aa.png": b"fake"})
    raw = read_sb3_archive(path)
    assert raw.project_id == "314"
    assert json.loads(raw.project_json.decode()) == doc
    assert raw.assets == {"aa.png": b"fake"}


def test_archive_without_project_json_is_rejected(tmp_path):
    path = tmp_path / "empty.sb3"
    with zipfile.ZipFile(path, "w") as zf:
        zf.writestr("readme.txt", "no project here")
    with pytest.raises(MissingProjectJson):
        read_sb3_archive(path)


def test_non_zip_bytes_are_a_corrupt_archive(tmp_path):
    path = tmp_path / "broken.sb3"
    path.write_bytes(b"\x00\x01 definitely not a zip")
    with pytest.raises(CorruptArchive):
        read_sb3_archive(path)


def test_non_utf8_project_json_is_rejected(tmp_path):
    path = tmp_path / "latin.sb3"
    with zipfile.ZipFile(path, "w") as zf:
        zf.writestr("project.json", b"\xff\xfe{}")
    with pytest.raises(InvalidUtf8):
        read_sb3_archive(path)


def test_read_project_dir_collects_sibling_assets(tmp_path):
    doc = project_doc(target("S"))
    root = write_project_dir(tmp_path, "77", doc, assets={"bb.wav": b"sounddata"})
    raw = read_project_dir(root)
    assert raw.project_id == "77"
    assert raw.assets == {"bb.wav": b"sounddata"}


def test_discover_studio_mixes_archives_and_directories(tmp_path):
    doc = project_doc(target("S"))
    write_sb3(tmp_path, "20", doc)
    write_project_dir(tmp_path, "10", doc)
    (tmp_path / "notes.txt").write_text("ignored")
    (tmp_path / "empty_dir").mkdir()
    found = discover_studio(tmp_path)
    assert [pid for pid, _ in found] == ["10", "20"]


def test_load_local_studio_requires_at_least_one_project(tmp_path):
    with pytest.raises(EmptyStudio):
        load_local_studio(tmp_path)


def _studio_transport(
    docs: dict[str, dict],
    assets: dict[str, bytes],
    page_size: int,
    failing: set[str] = frozenset(),
):
    roster = [{"id": int(pid), "title": f"Project {pid}"} for pid in sorted(docs)]

    def handler(request: httpx.Request) -> httpx.Response:
        host, path = request.url.host, request.url.path
        if host == "api.scratch.mit.edu":
            if "/studios/404/" in path:
                return httpx.Response(404)
            offset = int(request.url.params.get("offset", 0))
            return httpx.Response(200, json=roster[offset : offset + page_size])
        if host == "projects.scratch.mit.edu":
            pid = path.strip("/")
            if pid in failing:
                return httpx.Response(500)
            return httpx.Response(200, content=json.dumps(docs[pid]).encode())
        if host == "assets.scratch.mit.edu":
            name = path.split("/asset/")[1].split("/")[0]
            if name in assets:
                return httpx.Response(200, content=assets[name])
            return httpx.Response(404)
        raise AssertionError(f"unexpected request: {request.url}")

    return httpx.MockTransport(handler)


def _sample_remote_studio():
    white = png_bytes((255, 255, 255))
    c = costume("white", white)
    docs = {
        "101": project_doc(target("A", costumes=[c])),
        "102": project_doc(target("B")),
        "103": project_doc(target("C")),
    }
    return docs, {c["md5ext"]: white}


def test_fetch_studio_downloads_projects_and_assets(tmp_path):
    docs, assets = _sample_remote_studio()
    settings = FetchSettings(page_size=2)
    client = httpx.Client(transport=_studio_transport(docs, assets, page_size=2))
    manifest = fetch_studio("55", tmp_path, settings=settings, client=client, parallelism=1)
    assert manifest.counts() == {"fetched": 3, "cached": 0, "failed": 0}
    assert (tmp_path / "101" / "project.json").is_file()
    md5ext = next(iter(assets))
    assert (tmp_path / "101" / md5ext).read_bytes() == assets[md5ext]
    saved = FetchManifest.from_dict(json.loads((tmp_path / "manifest.json").read_text()))
    assert [e.project_id for e in saved.entries] == ["101", "102", "103"]


def test_refetch_uses_the_cache(tmp_path):
    docs, assets = _sample_remote_studio()
    settings = FetchSettings(page_size=10)
    for expected in ("fetched", "cached"):
        client = httpx.Client(transport=_studio_transport(docs, assets, page_size=10))
        manifest = fetch_studio("55", tmp_path, settings=settings, client=client, parallelism=1)
        assert manifest.counts()[expected] == 3


def test_failed_download_is_an_entry_not_an_exception(tmp_path):
    docs, assets = _sample_remote_studio()
    settings = FetchSettings(page_size=10)
    client = httpx.Client(
        transport=_studio_transport(docs, assets, page_size=10, failing={"102"})
    )
    manifest = fetch_studio("55", tmp_path, settings=settings, client=client, parallelism=1)
    statuses = {e.project_id: e.status for e in manifest.entries}
    assert statuses == {"101": "fetched", "102": "failed", "103": "fetched"}
    assert not (tmp_path / "102" / "project.json").exists()


def test_missing_studio_raises(tmp_path):
    docs, assets = _sample_remote_studio()
    client = httpx.Client(transport=_studio_transport(docs, assets, page_size=10))
    with pytest.raises(StudioNotFound):
        fetch_studio("404", tmp_path, settings=FetchSettings(), client=client, parallelism=1)


def test_fetch_limit_caps_the_roster(tmp_path):
    docs, assets = _sample_remote_studio()
    client = httpx.Client(transport=_studio_transport(docs, assets, page_size=10))
    manifest = fetch_studio(
        "55", tmp_path, limit=2, settings=FetchSettings(), client=client, parallelism=1
    )
    assert [e.project_id for e in manifest.entries] == ["101", "102"]


def test_fetched_studio_is_directly_scorable(tmp_path):
    docs, assets = _sample_remote_studio()
    client = httpx.Client(transport=_studio_transport(docs, assets, page_size=10))
    fetch_studio("55", tmp_path, settings=FetchSettings(), client=client, parallelism=1)
    raws = load_local_studio(tmp_path)
    assert [r.project_id for r in raws] == ["101", "102", "103"]
