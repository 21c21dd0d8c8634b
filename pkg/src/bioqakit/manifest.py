"""Run manifests: content hashes that link every output to its inputs and config."""

import hashlib
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from . import __version__
from .models import Context
from .utils import dump_json, write_bytes

MANIFEST_SUFFIX = ".manifest.json"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Path, chunk_size: int = 1 << 20) -> str:
    """Stream a file through sha256."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        while chunk := f.read(chunk_size):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(output: Path) -> Path:
    """``out.json`` -> ``out.json.manifest.json``; a directory gets ``manifest.json`` inside."""
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + MANIFEST_SUFFIX)


def _entry(ctx: Context, path: Path) -> dict[str, str]:
    try:
        shown = path.resolve().relative_to(ctx.root.resolve())
    except ValueError:
        shown = path
    return {"path": shown.as_posix(), "sha256": sha256_file(path)}


def build_manifest(
    ctx: Context,
    command: str,
    inputs: Iterable[Path],
    outputs: Iterable[Path],
    arguments: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Manifest payload; holds no timestamps so equal runs give equal manifests."""
    return {
        "tool": "bioqakit",
        "version": __version__,
        "command": command,
        "arguments": {k: str(v) if isinstance(v, Path) else v for k, v in (arguments or {}).items()},
        "config": ctx.config.to_dict(),
        "config_sha256": ctx.config.digest,
        "config_source": str(ctx.config_source) if ctx.config_source else None,
        "inputs": [_entry(ctx, p) for p in inputs],
        "outputs": [_entry(ctx, p) for p in outputs],
    }


def write_manifest(
    ctx: Context,
    command: str,
    inputs: Iterable[Path],
    outputs: list[Path],
    arguments: dict[str, Any] | None = None,
    target: Path | None = None,
) -> Path:
    """Write the manifest next to the first output (or to ``target``)."""
    path = target or manifest_path(outputs[0])
    write_bytes(path, dump_json(build_manifest(ctx, command, inputs, outputs, arguments), pretty=True))
    return path
