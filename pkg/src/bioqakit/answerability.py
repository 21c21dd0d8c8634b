"""Unanswerable-rate audit for the extractive setting.

A gold item that has no boundary-valid exact match in any snippet is
classified by the first relaxation that finds it: lowercase, whitespace
collapse, then a shorter phrase of the answer.
"""

import math
import re
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, ROUND_HALF_EVEN, Decimal
from enum import StrEnum
from fractions import Fraction
from typing import Any

from .converter import find_exact_spans
from .models import BioasqQuestion, QuestionType, Snippet

UNLABELED = "unlabeled"
TOTAL = "total"

_WHITESPACE = re.compile(r"\s+")


class MatchCategory(StrEnum):
    EXACT = "exact"
    LOWERCASE = "lowercase_match"
    WHITESPACE = "whitespace_variant"
    ADDITIONAL_PHRASE = "additional_phrase"
    NO_MATCH = "no_match"


def _found(text: str, needle: str) -> bool:
    return bool(needle) and bool(find_exact_spans(text, needle, boundary_required=True))


def _squash(text: str) -> str:
    return _WHITESPACE.sub(" ", text).lower()


def _phrases(synonym: str) -> Iterable[str]:
    """Contiguous token runs covering at least half of the synonym, longest first."""
    # runs only: "heat protein" is not a phrase of "heat shock protein"
    tokens = synonym.split()
    n = len(tokens)
    for length in range(n - 1, math.ceil(n / 2) - 1, -1):
        if length < 1:
            break
        for start in range(n - length + 1):
            yield " ".join(tokens[start : start + length])


def classify_match(gold_item: Sequence[str], snippets: Sequence[Snippet]) -> MatchCategory:
    """Best category over all synonyms and snippets; checks run in a fixed order."""
    synonyms = [s for s in gold_item if s]
    texts = [snippet.text for snippet in snippets]

    if any(_found(t, s) for t in texts for s in synonyms):
        return MatchCategory.EXACT
    if any(_found(t.lower(), s.lower()) for t in texts for s in synonyms):
        return MatchCategory.LOWERCASE

    squashed = [_squash(t) for t in texts]
    if any(_found(t, _squash(s).strip()) for t in squashed for s in synonyms):
        return MatchCategory.WHITESPACE
    if any(_found(t, p.lower()) for t in squashed for s in synonyms for p in _phrases(s)):
        return MatchCategory.ADDITIONAL_PHRASE
    return MatchCategory.NO_MATCH


@dataclass(frozen=True)
class AnswerabilityResult:
    question_id: str
    qtype: QuestionType
    answerable: bool
    categories: tuple[MatchCategory, ...]

    @property
    def category(self) -> MatchCategory:
        """First non-exact item category, or EXACT when every item matched."""
        if not self.categories:
            return MatchCategory.NO_MATCH
        return next((c for c in self.categories if c != MatchCategory.EXACT), MatchCategory.EXACT)


def question_answerable(question: BioasqQuestion) -> AnswerabilityResult:
    """Factoid: the single item matches exactly. List: every item matches exactly.

    Raises:
        ValueError: For yes/no questions
    """
    if question.qtype == QuestionType.YESNO:
        raise ValueError(f"Question '{question.id}' is yes/no and has no extractive answer")

    categories = tuple(classify_match(item, question.snippets) for item in question.gold.items)
    answerable = bool(categories) and all(c == MatchCategory.EXACT for c in categories)
    return AnswerabilityResult(question.id, question.qtype, answerable, categories)


def format_rate(rate: Fraction, rounding: str = ROUND_HALF_EVEN) -> float:
    value = Decimal(rate.numerator) / Decimal(rate.denominator)
    return float(value.quantize(Decimal("0.001"), rounding=rounding))


@dataclass
class AuditRow:
    batch: str
    qtype: QuestionType
    unanswerable: int = 0
    total: int = 0
    categories: Counter[str] = field(default_factory=Counter)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.unanswerable, self.total) if self.total else Fraction(0)

    def add(self, result: AnswerabilityResult) -> None:
        self.total += 1
        if not result.answerable:
            self.unanswerable += 1
            self.categories[str(result.category)] += 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "batch": self.batch,
            "type": str(self.qtype),
            "unanswerable": self.unanswerable,
            "total": self.total,
            "fraction": f"{self.unanswerable}/{self.total}",
            "rate": format_rate(self.rate),
            "rate_truncated": format_rate(self.rate, ROUND_DOWN),
            "categories": dict(sorted(self.categories.items())),
        }


@dataclass
class UnanswerableReport:
    """Per (batch, type) counts with exact fractions, plus per-question rows."""

    rows: dict[tuple[str, QuestionType], AuditRow] = field(default_factory=dict)
    results: list[tuple[str, AnswerabilityResult]] = field(default_factory=list)

    def row(self, batch: str, qtype: QuestionType) -> AuditRow:
        return self.rows[(batch, qtype)]

    def rate(self, batch: str, qtype: QuestionType) -> Fraction:
        return self.row(batch, qtype).rate

    def to_dict(self) -> dict[str, Any]:
        return {
            "list_rule": "a list question is answerable only if every gold item matches exactly",
            "rounding": "rate is round-half-even to 3 decimals; rate_truncated cuts instead",
            "rows": [row.to_dict() for row in self.rows.values()],
            "questions": [
                {
                    "id": result.question_id,
                    "batch": batch,
                    "type": str(result.qtype),
                    "answerable": result.answerable,
                    "category": str(result.category),
                    "items": [str(c) for c in result.categories],
                }
                for batch, result in self.results
            ],
        }


def audit(
    questions: Iterable[BioasqQuestion],
    batch_labels: Mapping[str, str] | None = None,
) -> UnanswerableReport:
    """Aggregate answerability per batch and type, with a ``total`` row per type.

    Yes/no questions are not part of the audit and are ignored. Questions
    without a batch label are reported under ``unlabeled``.
    """
    labels = batch_labels or {}
    report = UnanswerableReport()
    totals: dict[QuestionType, AuditRow] = {}

    for question in questions:
        if question.qtype == QuestionType.YESNO:
            continue
        result = question_answerable(question)
        batch = labels.get(question.id, UNLABELED)
        report.results.append((batch, result))

        key = (batch, question.qtype)
        if key not in report.rows:
            report.rows[key] = AuditRow(batch, question.qtype)
        report.rows[key].add(result)
        totals.setdefault(question.qtype, AuditRow(TOTAL, question.qtype)).add(result)

    for qtype in (QuestionType.FACTOID, QuestionType.LIST):
        if qtype in totals:
            report.rows[(TOTAL, qtype)] = totals[qtype]
    return report
