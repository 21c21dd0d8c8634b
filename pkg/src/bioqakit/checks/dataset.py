"""Invariant checks for parsed BioASQ questions."""

from collections.abc import Sequence
from dataclasses import dataclass

from ..models import BioasqQuestion, Context, Output, QuestionType


@dataclass(frozen=True)
class Violation:
    question_id: str
    index: int
    invariant: str  # short rule name, e.g. "factoid-items"
    message: str

    def __str__(self) -> str:
        return f"{self.question_id} (record {self.index}): {self.message}"


def _gold_violations(q: BioasqQuestion, index: int) -> list[Violation]:
    found = []
    gold = q.gold

    def add(rule: str, message: str) -> None:
        found.append(Violation(q.id, index, rule, message))

    if q.qtype == QuestionType.YESNO:
        if gold.yes_label is None:
            add("yesno-label", "Yes/no question must carry a yes/no label")
        if gold.items:
            add("yesno-items", "Yes/no question must not carry answer items")
        return found

    if gold.yes_label is not None:
        add("extractive-label", "Only yes/no questions carry a yes/no label")
    if q.qtype == QuestionType.FACTOID and len(gold.items) != 1:
        add("factoid-items", "Factoid must have exactly one item")
    if q.qtype == QuestionType.LIST and not gold.items:
        add("list-items", "List must have at least one item")
    for n, item in enumerate(gold.items):
        if not item:
            add("synonyms", f"Answer item {n} has no synonyms")
        elif not all(s for s in item):
            add("synonyms", f"Answer item {n} has an empty synonym")
    return found


def _snippet_violations(q: BioasqQuestion, index: int) -> list[Violation]:
    found = []
    if not q.snippets:
        found.append(Violation(q.id, index, "snippets", "Question has no snippets"))
    for n, snippet in enumerate(q.snippets):
        if not snippet.text:
            found.append(Violation(q.id, index, "snippet-text", f"Snippet {n} is empty"))
        offsets = snippet.source_offsets
        if offsets is not None and offsets[1] <= offsets[0]:
            found.append(
                Violation(q.id, index, "snippet-offsets", f"Snippet {n} offsets end before they begin")
            )
    return found


def validate_dataset(questions: Sequence[BioasqQuestion]) -> list[Violation]:
    """Every broken invariant, in record order; empty when the data is clean."""
    violations: list[Violation] = []
    first_seen: dict[str, int] = {}
    for index, question in enumerate(questions):
        if question.id in first_seen:
            violations.append(
                Violation(
                    question.id,
                    index,
                    "unique-id",
                    f"Duplicate id also used by record {first_seen[question.id]}",
                )
            )
        else:
            first_seen[question.id] = index
        violations += _gold_violations(question, index)
        violations += _snippet_violations(question, index)
    return violations


def _as_output(name: str, violations: list[Violation], total: int) -> Output:
    if not violations:
        return Output(success=True, message=f"{name}: {total} question(s) OK")
    return Output(
        success=False,
        message=f"{name}: {len(violations)} violation(s)",
        data={"violations": [v.__dict__ for v in violations]},
        details=[{"type": "error", "content": str(v)} for v in violations],
        exit_code=5,
    )


def check_unique_ids(ctx: Context, questions: Sequence[BioasqQuestion], **kwargs) -> Output:
    """Check question ids are unique."""
    found = [v for v in validate_dataset(questions) if v.invariant == "unique-id"]
    return _as_output("Question ids", found, len(questions))


def check_gold_answers(ctx: Context, questions: Sequence[BioasqQuestion], **kwargs) -> Output:
    """Check gold answers have the shape their question type requires."""
    found = [v for i, q in enumerate(questions) for v in _gold_violations(q, i)]
    return _as_output("Gold answers", found, len(questions))


def check_snippets(ctx: Context, questions: Sequence[BioasqQuestion], **kwargs) -> Output:
    """Check every question has usable snippets."""
    found = [v for i, q in enumerate(questions) for v in _snippet_violations(q, i)]
    return _as_output("Snippets", found, len(questions))
