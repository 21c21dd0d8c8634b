"""Reduce command: shrink SQuAD contexts to the sentence holding the answer."""

from pathlib import Path

from ..constants import ARROW
from ..contexts import discrepancy_report, length_distribution, reduce_dataset
from ..converter import filter_unmatched_squad
from ..decorators import arg, command
from ..formats import parse_squad, write_squad
from ..manifest import write_manifest
from ..models import Context, Output
from ..utils import dump_json, read_bytes, write_bytes
from .filter import BOUNDARY_ARG


@command(
    "reduce",
    "Reduce SQuAD contexts to their minimal answer-bearing sentences",
    arguments=(
        arg("--in", dest="input", type=Path, required=True, help="SQuAD JSON file"),
        arg("--out", type=Path, required=True, help="Reduced SQuAD JSON output"),
        arg("--report", type=Path, help="Write the reduction report here"),
        BOUNDARY_ARG,
    ),
)
def reduce(ctx: Context, input: Path, out: Path, report: Path | None = None) -> Output:
    """Filter unmatched answers, then reduce every context."""
    input_path = ctx.resolve(input)
    dataset = parse_squad(read_bytes(input_path))
    dataset, removed = filter_unmatched_squad(dataset, ctx.config.boundary_required)
    # Answerless (v2.0 unanswerable) instances have nothing to reduce around
    unanswered = sum(1 for inst in dataset.instances() if not inst.answers)
    if unanswered:
        return Output(
            success=False,
            message=f"{unanswered} instance(s) have no answer span; reduce needs answered data",
            next_steps=["Drop unanswerable instances before reducing"],
            exit_code=6,
        )
    reduced, summary = reduce_dataset(dataset)

    out_path = ctx.resolve(out)
    write_bytes(out_path, write_squad(reduced))
    outputs = [out_path]

    full = length_distribution(inst.context for inst in dataset.instances())
    minimal = length_distribution(inst.context for inst in reduced.instances())
    payload = {
        **summary.to_dict(),
        "filtered_out": removed,
        "lengths": {"full": full.to_dict(), "minimal": minimal.to_dict()},
    }
    if full.total and minimal.total:
        payload["discrepancy"] = discrepancy_report(full, minimal).to_dict()
    if report:
        report_path = ctx.resolve(report)
        write_bytes(report_path, dump_json(payload, pretty=True))
        outputs.append(report_path)
    write_manifest(ctx, "reduce", [input_path], outputs)

    return Output(
        success=True,
        message=f"Reduced {summary.instances} instance(s) into {out_path.name}",
        data=payload,
        details=[
            {"type": "info", "content": f"Mean context length: {full.mean:.1f} {ARROW} {minimal.mean:.1f} tokens"},
            {"type": "info", "content": f"Filtered before reducing: {removed}"},
            {"type": "info", "content": f"Answer spans dropped: {summary.spans_dropped}"},
        ],
        next_steps=[f"Compare lengths: bioqakit stats --in {out} --vs <other file>"],
    )
