"""Dedup command: collapse equivalent answer candidates in a prediction file."""

import argparse
from pathlib import Path

from ..decorators import arg, command
from ..errors import SchemaError
from ..formats import parse_predictions, write_predictions
from ..manifest import write_manifest
from ..models import Context, Output
from ..normalize import dedup_candidates
from ..utils import load_json, read_bytes, write_bytes


def load_aliases(data: bytes) -> dict[str, str]:
    root = load_json(data)
    if not isinstance(root, dict) or not all(isinstance(v, str) for v in root.values()):
        raise SchemaError("Aliases must map each alias to its canonical string")
    return root


@command(
    "dedup",
    "Remove duplicate factoid and list candidates from predictions",
    arguments=(
        arg("--in", dest="input", type=Path, required=True, help="Prediction file"),
        arg("--out", type=Path, required=True, help="Deduplicated prediction file"),
        arg("--aliases", type=Path, help="JSON mapping of alias to canonical answer"),
        arg(
            "--normalize",
            action=argparse.BooleanOptionalAction,
            default=None,
            help="Treat case, whitespace and edge punctuation variants as duplicates",
        ),
    ),
)
def dedup(ctx: Context, input: Path, out: Path, aliases: Path | None = None) -> Output:
    """Deduplicate ranked factoid lists and list answer sets, keeping order."""
    input_path = ctx.resolve(input)
    inputs = [input_path]
    preds = parse_predictions(read_bytes(input_path))
    mapping = None
    if aliases:
        alias_path = ctx.resolve(aliases)
        mapping = load_aliases(read_bytes(alias_path))
        inputs.append(alias_path)

    strict = not ctx.config.normalize
    removed = 0
    for bucket in (preds.factoid, preds.lists):
        for qid, candidates in bucket.items():
            kept = tuple(dedup_candidates(candidates, mapping, strict))
            removed += len(candidates) - len(kept)
            bucket[qid] = kept

    out_path = ctx.resolve(out)
    write_bytes(out_path, write_predictions(preds))
    write_manifest(ctx, "dedup", inputs, [out_path])
    return Output(
        success=True,
        message=f"Removed {removed} duplicate candidate(s)",
        data={"removed": removed, "questions": len(preds)},
    )
