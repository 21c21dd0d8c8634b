"""File and JSON helpers shared by formats and commands."""

import json
from pathlib import Path
from typing import Any

from .errors import InputError, ParseError, SchemaError


def read_bytes(path: Path) -> bytes:
    """Read an input file, turning OS failures into InputError."""
    try:
        return path.read_bytes()
    except FileNotFoundError as e:
        raise InputError(f"Input file not found: {path}", path=str(path)) from e
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}", path=str(path)) from e


def write_bytes(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)


def load_json(data: bytes, object_pairs_hook=None) -> Any:
    """Decode UTF-8 JSON, reporting failures with a byte offset.

    Args:
        data: Raw file contents
        object_pairs_hook: Passed through to json.loads

    Raises:
        ParseError: If the bytes are not UTF-8 or not JSON
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"Input is not UTF-8: {e.reason}", offset=e.start) from e

    try:
        return json.loads(text, object_pairs_hook=object_pairs_hook)
    except json.JSONDecodeError as e:
        # e.pos counts characters; report bytes so the offset works with dd/xxd
        offset = len(text[: e.pos].encode("utf-8"))
        raise ParseError(f"Malformed JSON: {e.msg}", offset=offset) from e


def dump_json(obj: Any, pretty: bool = False) -> bytes:
    """Encode as UTF-8 JSON without escaping non-ASCII, newline-terminated."""
    if pretty:
        text = json.dumps(obj, ensure_ascii=False, indent=2)
    else:
        text = json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
    return (text + "\n").encode("utf-8")


def rejecting_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    """object_pairs_hook that refuses duplicate keys instead of keeping the last."""
    result: dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise SchemaError(f"Duplicate key '{key}'", field=key)
        result[key] = value
    return result
