"""Validate command: run the invariant checks on a BioASQ or SQuAD file."""

from pathlib import Path

from ..checks.dataset import check_gold_answers, check_snippets, check_unique_ids
from ..checks.squad import (
    check_answer_boundaries,
    check_answer_offsets,
    check_answered,
    check_instance_ids,
)
from ..decorators import arg, command
from ..formats import parse_bioasq, parse_squad
from ..models import Context, Output
from ..utils import read_bytes
from ..workflows import Workflow
from .stats import detect_format


@command(
    "validate",
    "Check a BioASQ or SQuAD file against the dataset invariants",
    arguments=(
        arg("--in", dest="input", type=Path, required=True, help="File to validate"),
        arg(
            "--format",
            dest="file_format",
            choices=["auto", "bioasq", "squad"],
            default="auto",
            help="Input format (default: detect)",
        ),
    ),
)
def validate(ctx: Context, input: Path, file_format: str = "auto") -> Output:
    """Run every check; failures are collected, not short-circuited."""
    data = read_bytes(ctx.resolve(input))
    if file_format == "auto":
        file_format = detect_format(data)

    if file_format == "bioasq":
        questions = parse_bioasq(data).questions
        return (
            Workflow("validate-bioasq")
            .parallel(check_unique_ids, check_gold_answers, check_snippets)
            .run(ctx, questions=questions)
        )
    if file_format == "squad":
        dataset = parse_squad(data)
        return (
            Workflow("validate-squad")
            .check(check_instance_ids)
            .check(check_answered)
            .check(check_answer_offsets)
            .check(check_answer_boundaries)
            .run(ctx, dataset=dataset)
        )
    return Output(
        success=False,
        message=f"Cannot validate '{file_format}' files",
        next_steps=["Pass --format bioasq or --format squad"],
        exit_code=3,
    )
