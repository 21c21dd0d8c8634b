"""Convert command: BioASQ questions to SQuAD (factoid/list) and yes/no instances."""

import argparse
from pathlib import Path

from ..converter import convert_questions
from ..decorators import arg, command
from ..formats import parse_bioasq, write_binary, write_squad
from ..manifest import write_manifest
from ..models import Context, ContextStrategy, Output, StrategyKind
from ..utils import dump_json, read_bytes, write_bytes


def strategy_from(ctx: Context) -> ContextStrategy:
    kind = StrategyKind(ctx.config.strategy)
    window = ctx.config.window if kind == StrategyKind.APPENDED else 0
    return ContextStrategy(kind, window)


@command(
    "convert",
    "Convert BioASQ questions into SQuAD-style instances",
    arguments=(
        arg("--in", dest="input", type=Path, required=True, help="BioASQ JSON file"),
        arg("--out", type=Path, required=True, help="SQuAD JSON output"),
        arg("--binary-out", type=Path, help="Yes/no instances (default: <out>.yesno.json)"),
        arg("--report", type=Path, help="Write the conversion report here"),
        arg("--strategy", choices=["snippet", "abstract", "appended"], help="Context strategy"),
        arg("--window", type=int, help="Sentences per side for the appended strategy"),
        arg(
            "--boundary",
            dest="boundary_required",
            action=argparse.BooleanOptionalAction,
            default=None,
            help="Require non-alphanumeric neighbours around answer matches",
        ),
        arg("--skip-errors", action="store_true", help="Record unconvertible questions and go on"),
        arg("--workers", type=int, help="Convert questions on this many threads"),
    ),
)
def convert(
    ctx: Context,
    input: Path,
    out: Path,
    binary_out: Path | None = None,
    report: Path | None = None,
    skip_errors: bool = False,
    workers: int | None = None,
) -> Output:
    """Convert a BioASQ file under the configured context strategy."""
    input_path = ctx.resolve(input)
    corpus = parse_bioasq(read_bytes(input_path))
    strategy = strategy_from(ctx)

    result = convert_questions(
        corpus.questions,
        strategy,
        boundary_required=ctx.config.boundary_required,
        strict=not skip_errors,
        max_workers=workers,
    )

    out_path = ctx.resolve(out)
    write_bytes(out_path, write_squad(result.dataset))
    outputs = [out_path]
    if result.binary:
        binary_path = ctx.resolve(binary_out) if binary_out else out_path.with_suffix(".yesno.json")
        write_bytes(binary_path, write_binary(result.binary))
        outputs.append(binary_path)

    summary = result.report.to_dict()
    summary["skipped_summary"] = corpus.skipped_summary
    summary["questions"] = len(corpus)
    if report:
        report_path = ctx.resolve(report)
        write_bytes(report_path, dump_json(summary, pretty=True))
        outputs.append(report_path)

    manifest = write_manifest(
        ctx,
        "convert",
        [input_path],
        outputs,
        {"strategy": strategy.label, "skip_errors": skip_errors},
    )

    details = [
        {"type": "info", "content": f"Strategy: {strategy.label}"},
        {"type": "info", "content": f"SQuAD instances: {len(result.dataset)}"},
        {"type": "info", "content": f"Yes/no instances: {len(result.binary)}"},
    ]
    if result.report.questions_skipped_no_match:
        details.append(
            {
                "type": "warning",
                "content": f"{result.report.questions_skipped_no_match} question(s) had no exact match",
            }
        )
    if corpus.skipped_summary:
        details.append(
            {"type": "warning", "content": f"{corpus.skipped_summary} summary question(s) skipped"}
        )
    for error in result.report.errors:
        details.append({"type": "error", "content": f"{error['id']}: {error['message']}"})

    return Output(
        success=True,
        message=f"Converted {len(corpus)} question(s) into {out_path.name}",
        data={"report": summary, "outputs": [str(p) for p in outputs], "manifest": str(manifest)},
        details=details,
        next_steps=[f"Reduce contexts: bioqakit reduce --in {out} --out <file>"],
    )
