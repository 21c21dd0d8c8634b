"""Filter command: drop SQuAD instances whose answers do not match their context."""

import argparse
from pathlib import Path

from ..converter import filter_unmatched_squad
from ..decorators import arg, command
from ..formats import parse_squad, squad_statistics, write_squad
from ..manifest import write_manifest
from ..models import Context, Output
from ..utils import read_bytes, write_bytes

BOUNDARY_ARG = arg(
    "--boundary",
    dest="boundary_required",
    action=argparse.BooleanOptionalAction,
    default=None,
    help="Also drop answers glued to alphanumeric neighbours",
)


@command(
    "filter",
    "Remove SQuAD instances with unmatched answer offsets",
    arguments=(
        arg("--in", dest="input", type=Path, required=True, help="SQuAD JSON file"),
        arg("--out", type=Path, required=True, help="Filtered SQuAD JSON output"),
        BOUNDARY_ARG,
    ),
)
def filter_squad(ctx: Context, input: Path, out: Path) -> Output:
    """Filter a SQuAD file and report original and remaining counts."""
    input_path = ctx.resolve(input)
    dataset = parse_squad(read_bytes(input_path))
    filtered, removed = filter_unmatched_squad(dataset, ctx.config.boundary_required)

    out_path = ctx.resolve(out)
    write_bytes(out_path, write_squad(filtered))
    write_manifest(ctx, "filter", [input_path], [out_path])

    before = squad_statistics(dataset)
    after = squad_statistics(filtered)
    return Output(
        success=True,
        message=f"Removed {removed} of {before.instances} instance(s)",
        data={"original": before.to_dict(), "filtered": after.to_dict(), "removed": removed},
        details=[
            {"type": "info", "content": f"Original: {before.instances}"},
            {"type": "info", "content": f"Kept: {after.instances}"},
            {"type": "info", "content": f"Boundary rule: {'on' if ctx.config.boundary_required else 'off'}"},
        ],
    )
