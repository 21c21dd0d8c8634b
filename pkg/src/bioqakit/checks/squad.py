"""Invariant checks for SQuAD-style datasets."""

from collections import Counter

from ..converter import answer_flagged
from ..models import Context, Output, SquadDataset


def check_answer_offsets(ctx: Context, dataset: SquadDataset, **kwargs) -> Output:
    """Check every answer's offsets point at its text."""
    flagged = dataset.flagged_ids()
    if not flagged:
        return Output(success=True, message=f"Answer offsets: {len(dataset)} instance(s) OK")
    return Output(
        success=False,
        message=f"Answer offsets: {len(flagged)} instance(s) do not match their context",
        data={"flagged": flagged},
        details=[{"type": "error", "content": qid} for qid in flagged],
        next_steps=["Drop them with: bioqakit filter --in <file> --out <file>"],
        exit_code=5,
    )


def check_answer_boundaries(ctx: Context, dataset: SquadDataset, **kwargs) -> Output:
    """Check answers are not glued to alphanumeric neighbours."""
    glued = [
        inst.id
        for inst in dataset.instances()
        if not inst.flagged
        and any(answer_flagged(inst, span, boundary_required=True) for span in inst.answers)
    ]
    if not glued:
        return Output(success=True, message="Answer boundaries: OK")
    # Informational unless the run asks for the boundary rule
    strict = ctx.config.boundary_required
    return Output(
        success=not strict,
        message=f"Answer boundaries: {len(glued)} instance(s) match mid-token",
        data={"mid_token": glued},
        details=[{"type": "warning", "content": qid} for qid in glued],
        exit_code=5 if strict else 0,
    )


def check_instance_ids(ctx: Context, dataset: SquadDataset, **kwargs) -> Output:
    """Check instance ids are unique."""
    counts = Counter(inst.id for inst in dataset.instances())
    duplicates = sorted(qid for qid, n in counts.items() if n > 1)
    if not duplicates:
        return Output(success=True, message="Instance ids: unique")
    return Output(
        success=False,
        message=f"Instance ids: {len(duplicates)} duplicated",
        data={"duplicates": duplicates},
        details=[{"type": "error", "content": qid} for qid in duplicates],
        exit_code=5,
    )


def check_answered(ctx: Context, dataset: SquadDataset, **kwargs) -> Output:
    """Check every instance has at least one answer."""
    empty = [inst.id for inst in dataset.instances() if not inst.answers]
    if not empty:
        return Output(success=True, message="Answers: every instance answered")
    return Output(
        success=False,
        message=f"Answers: {len(empty)} instance(s) without an answer",
        data={"unanswered": empty},
        details=[{"type": "error", "content": qid} for qid in empty],
        exit_code=5,
    )
