"""Run manifests."""

import hashlib
import json

from bioqakit import __version__
from bioqakit.config import PipelineConfig, RunContext
from bioqakit.manifest import build_manifest, manifest_path, sha256_file, write_manifest


def test_sha256_file_streams_in_chunks(tmp_path):
    path = tmp_path / "blob"
    payload = bytes(range(256)) * 1000
    path.write_bytes(payload)
    assert sha256_file(path, chunk_size=1000) == hashlib.sha256(payload).hexdigest()


def test_manifest_path(tmp_path):
    assert manifest_path(tmp_path / "out.json").name == "out.json.manifest.json"
    assert manifest_path(tmp_path) == tmp_path / "manifest.json"


def test_build_manifest_is_stable(tmp_path):
    source, target = tmp_path / "in.json", tmp_path / "out.json"
    source.write_text("{}")
    target.write_text("[]")
    ctx = RunContext(tmp_path, PipelineConfig())

    first = build_manifest(ctx, "convert", [source], [target], {"strategy": "snippet"})
    second = build_manifest(ctx, "convert", [source], [target], {"strategy": "snippet"})
    assert first == second
    assert first["version"] == __version__
    assert first["inputs"] == [{"path": "in.json", "sha256": hashlib.sha256(b"{}").hexdigest()}]
    assert first["config_sha256"] == ctx.config.digest


def test_config_change_changes_manifest(tmp_path):
    target = tmp_path / "out.json"
    target.write_text("[]")
    a = build_manifest(RunContext(tmp_path, PipelineConfig()), "convert", [], [target])
    b = build_manifest(RunContext(tmp_path, PipelineConfig(window=4)), "convert", [], [target])
    assert a["config_sha256"] != b["config_sha256"]


def test_write_manifest(tmp_path):
    target = tmp_path / "out.json"
    target.write_text("[]")
    path = write_manifest(RunContext(tmp_path, PipelineConfig()), "filter", [], [target])
    assert path == tmp_path / "out.json.manifest.json"
    assert json.loads(path.read_text())["command"] == "filter"
