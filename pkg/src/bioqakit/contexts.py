"""Sentence segmentation, minimal-context reduction and context-length statistics."""

import logging
import re
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .constants import ABBREVIATIONS, LENGTH_BUCKET_WIDTH, NUMBER_ABBREVIATIONS
from .errors import ConversionError
from .models import AnswerSpan, SquadArticle, SquadDataset, SquadInstance

LOG = logging.getLogger(__name__)

_TERMINATOR = re.compile(r"[.!?]+(?=\s)")
_INITIAL = re.compile(r"[A-Z]\.")
_OPENERS = "([{\"'“‘"


@dataclass(frozen=True, slots=True)
class SentenceSpan:
    start_char: int
    end_char: int  # exclusive

    def text(self, source: str) -> str:
        return source[self.start_char : self.end_char]


def segment_sentences(text: str) -> list[SentenceSpan]:
    """Split text on ., ! or ? followed by whitespace and an uppercase letter or digit.

    Spans exclude surrounding whitespace and cover every non-whitespace
    character. A single period after a known abbreviation ("et al.", "Fig.",
    "e.g."), a lone capital initial, or "No." before a number does not end a
    sentence.
    """
    boundaries: list[int] = []
    for match in _TERMINATOR.finditer(text):
        end = match.end()
        nxt = end
        while nxt < len(text) and text[nxt].isspace():
            nxt += 1
        if nxt == len(text):
            continue
        follower = text[nxt]
        if not (follower.isupper() or follower.isdigit()):
            continue
        if match.group() == "." and _is_abbreviation(text, match.start(), follower):
            continue
        boundaries.append(end)

    spans: list[SentenceSpan] = []
    cursor = 0
    for boundary in [*boundaries, len(text)]:
        start, end = cursor, boundary
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start < end:
            spans.append(SentenceSpan(start, end))
        cursor = boundary
    return spans


def _is_abbreviation(text: str, period: int, follower: str) -> bool:
    word_start = period
    while word_start > 0 and not text[word_start - 1].isspace():
        word_start -= 1
    word = text[word_start : period + 1].lstrip(_OPENERS)
    if follower.isdigit() and word.lower() in NUMBER_ABBREVIATIONS:
        return True
    return word.lower() in ABBREVIATIONS or _INITIAL.fullmatch(word) is not None


def reduce_to_minimal_context(instance: SquadInstance) -> SquadInstance:
    """Shrink the context to the sentence(s) holding the first answer span.

    Offsets are re-based; spans outside the chosen sentences are dropped.

    Raises:
        ConversionError: If the instance has no answer, or its first answer
            does not satisfy the substring invariant
    """
    if not instance.answers:
        raise ConversionError(f"Instance '{instance.id}' has no answer span to reduce around")
    first = instance.answers[0]
    if not first.matches(instance.context):
        raise ConversionError(
            f"Instance '{instance.id}' has an answer offset that does not match its context"
        )

    sentences = segment_sentences(instance.context)
    covering = [
        s for s in sentences if s.end_char > first.start_char and s.start_char < first.end_char
    ]
    if not covering:
        raise ConversionError(f"Instance '{instance.id}' has a whitespace-only answer span")
    # answer spans may carry edge whitespace that sentence spans trim
    lo = min(covering[0].start_char, first.start_char)
    hi = max(covering[-1].end_char, first.end_char)

    kept = tuple(
        AnswerSpan(span.start_char - lo, span.end_char - lo, span.text)
        for span in instance.answers
        if lo <= span.start_char and span.end_char <= hi
    )
    return replace(instance, context=instance.context[lo:hi], answers=kept)


@dataclass
class ReductionReport:
    instances: int = 0
    spans_dropped: int = 0
    multi_sentence: int = 0
    unchanged: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.__dict__,
            "span_rule": "first answer span decides the sentence; other spans kept only if inside it",
        }


def reduce_dataset(dataset: SquadDataset) -> tuple[SquadDataset, ReductionReport]:
    """Reduce every instance; article titles and instance order are kept."""
    report = ReductionReport()
    articles = []
    for article in dataset.articles:
        reduced = []
        for paragraph in article.paragraphs:
            for inst in paragraph.qas:
                small = reduce_to_minimal_context(inst)
                report.instances += 1
                report.spans_dropped += len(inst.answers) - len(small.answers)
                if small.context == inst.context:
                    report.unchanged += 1
                if len(segment_sentences(small.context)) > 1:
                    report.multi_sentence += 1
                reduced.append(small)
        grouped = SquadDataset.from_instances(reduced, title=article.title)
        for regrouped in grouped.articles:
            articles.append(SquadArticle(article.title, regrouped.paragraphs))
    if report.spans_dropped:
        LOG.warning("Dropped %d answer span(s) outside the minimal context", report.spans_dropped)
    return SquadDataset(version=dataset.version, articles=tuple(articles)), report


@dataclass(frozen=True)
class LengthDistribution:
    """Whitespace-token length statistics of a context collection."""

    histogram: dict[int, int] = field(default_factory=dict)  # bucket lower bound -> count
    mean: float = 0.0
    median: float = 0.0
    p95: float = 0.0
    total: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "mean": self.mean,
            "median": self.median,
            "p95": self.p95,
            "bucket_width": LENGTH_BUCKET_WIDTH,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def token_length(text: str) -> int:
    return len(text.split())


def length_distribution(contexts: Iterable[str]) -> LengthDistribution:
    lengths = np.array([token_length(c) for c in contexts], dtype=np.int64)
    if lengths.size == 0:
        return LengthDistribution()

    buckets = Counter(int(b) for b in (lengths // LENGTH_BUCKET_WIDTH) * LENGTH_BUCKET_WIDTH)
    return LengthDistribution(
        histogram=dict(sorted(buckets.items())),
        mean=float(lengths.mean()),
        median=float(np.median(lengths)),
        p95=float(np.percentile(lengths, 95)),
        total=int(lengths.size),
    )


@dataclass(frozen=True)
class DiscrepancyReport:
    mean_difference: float
    l1_distance: float

    def to_dict(self) -> dict[str, float]:
        return {"mean_difference": self.mean_difference, "l1_distance": self.l1_distance}


def discrepancy_report(a: LengthDistribution, b: LengthDistribution) -> DiscrepancyReport:
    """Compare two distributions: |mean difference| and L1 over normalized buckets.

    Raises:
        ValueError: If either distribution is empty
    """
    if a.total == 0 or b.total == 0:
        raise ValueError("Cannot compare an empty length distribution")

    buckets = sorted(set(a.histogram) | set(b.histogram))
    pa = np.array([a.histogram.get(k, 0) for k in buckets], dtype=np.float64) / a.total
    pb = np.array([b.histogram.get(k, 0) for k in buckets], dtype=np.float64) / b.total
    return DiscrepancyReport(
        mean_difference=abs(a.mean - b.mean),
        l1_distance=float(np.abs(pa - pb).sum()),
    )
