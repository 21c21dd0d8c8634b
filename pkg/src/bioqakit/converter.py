"""BioASQ to SQuAD conversion: context strategies and boundary-aware span search."""

import logging
from collections import Counter
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from .contexts import segment_sentences
from .errors import ConversionError
from .models import (
    AnswerSpan,
    BinaryInstance,
    BioasqQuestion,
    ContextStrategy,
    QuestionType,
    SquadArticle,
    SquadDataset,
    SquadInstance,
    SquadParagraph,
    StrategyKind,
)

LOG = logging.getLogger(__name__)


def on_boundary(text: str, start: int, end: int) -> bool:
    """True when the characters around [start, end), if any, are not alphanumeric."""
    before = text[start - 1] if start > 0 else ""
    after = text[end] if end < len(text) else ""
    return not before.isalnum() and not after.isalnum()


def find_exact_spans(context: str, answer: str, boundary_required: bool = True) -> list[AnswerSpan]:
    """Every case-sensitive occurrence of ``answer`` in ``context``, overlaps included.

    Raises:
        ValueError: If answer is empty
    """
    if not answer:
        raise ValueError("answer must be non-empty")

    spans = []
    start = context.find(answer)
    while start != -1:
        end = start + len(answer)
        if not boundary_required or on_boundary(context, start, end):
            spans.append(AnswerSpan(start, end, answer))
        start = context.find(answer, start + 1)
    return spans


@dataclass(frozen=True, slots=True)
class BuiltContext:
    text: str
    provenance: str  # "snippet:2", "abstract:<doc>", "appended:<doc>:1"
    fallback: bool = False


def build_contexts(question: BioasqQuestion, strategy: ContextStrategy) -> list[BuiltContext]:
    """Contexts for one question under a strategy.

    Raises:
        ConversionError: Full-abstract strategy on a question without abstracts
    """
    match strategy.kind:
        case StrategyKind.SNIPPET:
            return [
                BuiltContext(s.text, f"snippet:{i}") for i, s in enumerate(question.snippets)
            ]
        case StrategyKind.ABSTRACT:
            return _abstract_contexts(question)
        case StrategyKind.APPENDED:
            return [
                _appended_context(question, i, strategy.window)
                for i in range(len(question.snippets))
            ]
        case _:
            raise ConversionError(f"Unknown context strategy '{strategy.kind}'")


def _abstract_contexts(question: BioasqQuestion) -> list[BuiltContext]:
    if not question.abstracts:
        raise ConversionError(
            f"Question '{question.id}' has no abstracts for the full-abstract strategy",
            question_id=question.id,
        )
    # Abstracts of cited documents first, in snippet order
    docs = list(
        dict.fromkeys(
            s.document_id for s in question.snippets if s.document_id in question.abstracts
        )
    )
    if not docs:
        docs = list(question.abstracts)

    contexts: list[BuiltContext] = []
    seen: set[str] = set()
    for doc in docs:
        text = question.abstracts[doc]
        if text in seen:
            continue
        seen.add(text)
        contexts.append(BuiltContext(text, f"abstract:{doc}"))
    return contexts


def _appended_context(question: BioasqQuestion, index: int, window: int) -> BuiltContext:
    snippet = question.snippets[index]
    abstract = question.abstracts.get(snippet.document_id)
    offsets = snippet.source_offsets

    if abstract is None or offsets is None or abstract[offsets[0] : offsets[1]] != snippet.text:
        LOG.debug("Snippet %d of '%s' falls back to snippet-as-is", index, question.id)
        return BuiltContext(snippet.text, f"snippet:{index}", fallback=True)

    begin, end = offsets
    if window == 0:
        return BuiltContext(snippet.text, f"appended:{snippet.document_id}:0")

    sentences = segment_sentences(abstract)
    touched = [i for i, s in enumerate(sentences) if s.end_char > begin and s.start_char < end]
    if not touched:
        return BuiltContext(snippet.text, f"snippet:{index}", fallback=True)

    left = sentences[max(0, touched[0] - window)].start_char
    right = sentences[min(len(sentences) - 1, touched[-1] + window)].end_char
    text = abstract[min(left, begin) : max(right, end)]
    return BuiltContext(text, f"appended:{snippet.document_id}:{window}")


def _item_spans(context: str, item: Iterable[str], boundary_required: bool) -> tuple[AnswerSpan, ...]:
    found = {
        (span.start_char, span.end_char, span.text)
        for synonym in item
        if synonym
        for span in find_exact_spans(context, synonym, boundary_required)
    }
    return tuple(AnswerSpan(*key) for key in sorted(found))


def triplets_for_contexts(
    question: BioasqQuestion,
    contexts: list[BuiltContext],
    boundary_required: bool = True,
) -> list[SquadInstance]:
    instances = []
    for ci, context in enumerate(contexts):
        for ii, item in enumerate(question.gold.items):
            spans = _item_spans(context.text, item, boundary_required)
            if spans:
                instances.append(
                    SquadInstance(
                        id=f"{question.id}_{ci}_{ii}",
                        question=question.body,
                        context=context.text,
                        answers=spans,
                    )
                )
    return instances


def enumerate_qca_triplets(
    question: BioasqQuestion,
    strategy: ContextStrategy,
    boundary_required: bool = True,
) -> list[SquadInstance]:
    """One instance per (context, gold item) pair with at least one span.

    All spans of all synonyms of the item go into that instance. Instance ids
    are ``<question>_<context index>_<item index>``.

    Raises:
        ConversionError: For yes/no questions, or when contexts cannot be built
    """
    if question.qtype == QuestionType.YESNO:
        raise ConversionError(
            f"Question '{question.id}' is yes/no; use convert_yesno", question_id=question.id
        )
    return triplets_for_contexts(question, build_contexts(question, strategy), boundary_required)


def convert_yesno(question: BioasqQuestion) -> list[BinaryInstance]:
    if question.qtype != QuestionType.YESNO:
        raise ConversionError(f"Question '{question.id}' is not yes/no", question_id=question.id)
    if question.gold.yes_label is None:
        raise ConversionError(f"Question '{question.id}' has no yes/no label", question_id=question.id)
    if not question.snippets:
        LOG.warning("Yes/no question '%s' has no snippets", question.id)
    return [
        BinaryInstance(
            id=f"{question.id}_{i}",
            question=question.body,
            context=snippet.text,
            label=question.gold.yes_label,
        )
        for i, snippet in enumerate(question.snippets)
    ]


@dataclass
class ConversionReport:
    """Counts per question type; merging two reports adds them up."""

    strategy: str = "snippet"
    counts: Counter[str] = field(default_factory=Counter)
    errors: list[dict[str, str]] = field(default_factory=list)

    def merge(self, other: "ConversionReport") -> "ConversionReport":
        return ConversionReport(
            strategy=self.strategy,
            counts=self.counts + other.counts,
            errors=self.errors + other.errors,
        )

    @property
    def instances_emitted(self) -> int:
        return sum(self.counts[f"{t}.instances"] for t in QuestionType)

    @property
    def questions_skipped_no_match(self) -> int:
        return sum(self.counts[f"{t}.skipped_no_match"] for t in QuestionType)

    def to_dict(self) -> dict[str, Any]:
        per_type = {}
        for qtype in QuestionType:
            prefix = f"{qtype}."
            per_type[str(qtype)] = {
                key.removeprefix(prefix): value
                for key, value in sorted(self.counts.items())
                if key.startswith(prefix)
            }
        return {
            "strategy": self.strategy,
            "instances_emitted": self.instances_emitted,
            "questions_skipped_no_match": self.questions_skipped_no_match,
            "fallback_contexts": self.counts["contexts.fallback"],
            "per_type": per_type,
            "errors": self.errors,
        }


@dataclass
class ConversionResult:
    dataset: SquadDataset
    binary: list[BinaryInstance]
    report: ConversionReport


def _convert_one(
    question: BioasqQuestion, strategy: ContextStrategy, boundary_required: bool
) -> tuple[list[SquadInstance], list[BinaryInstance], ConversionReport]:
    report = ConversionReport(strategy=strategy.label)
    qtype = str(question.qtype)
    report.counts[f"{qtype}.questions"] += 1

    if question.qtype == QuestionType.YESNO:
        binary = convert_yesno(question)
        report.counts[f"{qtype}.instances"] += len(binary)
        if not binary:
            report.counts[f"{qtype}.no_snippets"] += 1
        return [], binary, report

    contexts = build_contexts(question, strategy)
    report.counts["contexts.fallback"] += sum(1 for c in contexts if c.fallback)
    instances = triplets_for_contexts(question, contexts, boundary_required)
    report.counts[f"{qtype}.instances"] += len(instances)
    report.counts[f"{qtype}.spans"] += sum(len(inst.answers) for inst in instances)
    if not instances:
        report.counts[f"{qtype}.skipped_no_match"] += 1
    return instances, [], report


def convert_questions(
    questions: Iterable[BioasqQuestion],
    strategy: ContextStrategy,
    boundary_required: bool = True,
    strict: bool = True,
    max_workers: int | None = None,
) -> ConversionResult:
    """Convert a corpus; output order follows input order.

    Args:
        questions: Parsed BioASQ questions
        strategy: Context strategy
        boundary_required: Apply the boundary rule to span search
        strict: Re-raise the first ConversionError instead of recording it
        max_workers: Thread pool size; ``None`` converts sequentially
    """
    questions = list(questions)

    def run(question: BioasqQuestion):
        try:
            return _convert_one(question, strategy, boundary_required)
        except ConversionError as e:
            if strict:
                raise
            failed = ConversionReport(strategy=strategy.label)
            failed.counts[f"{question.qtype}.questions"] += 1
            failed.counts[f"{question.qtype}.errors"] += 1
            failed.errors.append({"id": question.id, "message": e.message})
            return [], [], failed

    if max_workers:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            results = list(executor.map(run, questions))
    else:
        results = [run(q) for q in questions]

    report = ConversionReport(strategy=strategy.label)
    squad: list[SquadInstance] = []
    binary: list[BinaryInstance] = []
    for instances, yesno, partial in results:
        squad.extend(instances)
        binary.extend(yesno)
        report = report.merge(partial)

    if report.errors:
        LOG.warning("%d question(s) could not be converted", len(report.errors))
    return ConversionResult(SquadDataset.from_instances(squad), binary, report)


def answer_flagged(instance: SquadInstance, span: AnswerSpan, boundary_required: bool) -> bool:
    if not span.matches(instance.context):
        return True
    return boundary_required and not on_boundary(instance.context, span.start_char, span.end_char)


def filter_unmatched_squad(
    dataset: SquadDataset, boundary_required: bool = False
) -> tuple[SquadDataset, int]:
    """Drop instances with any answer whose offsets do not match its text.

    With ``boundary_required`` an answer glued to alphanumeric neighbours is
    dropped too. Paragraphs left without questions are removed.
    """
    removed = 0
    articles = []
    for article in dataset.articles:
        paragraphs = []
        for paragraph in article.paragraphs:
            kept = []
            for inst in paragraph.qas:
                if any(answer_flagged(inst, span, boundary_required) for span in inst.answers):
                    removed += 1
                else:
                    kept.append(inst)
            if kept:
                paragraphs.append(SquadParagraph(paragraph.context, tuple(kept)))
        articles.append(SquadArticle(article.title, tuple(paragraphs)))

    if removed:
        LOG.info("Removed %d instance(s) with unmatched answers", removed)
    return SquadDataset(version=dataset.version, articles=tuple(articles)), removed
