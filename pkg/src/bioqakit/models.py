"""Core data models for bioqakit.

Domain records are frozen dataclasses holding tuples, so they are safe to share
across threads. Constructors only check field-local facts; cross-field
invariants are reported by ``checks.dataset.validate_dataset`` instead of
raising, so invalid input can still be loaded and audited.
"""

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from types import MappingProxyType
from typing import Any

# Import RunContext as Context, mirroring how commands receive it
from .config import RunContext as Context

__all__ = [
    "Output",
    "Context",
    "QuestionType",
    "Snippet",
    "GoldAnswer",
    "BioasqQuestion",
    "BioasqCorpus",
    "AnswerSpan",
    "SquadInstance",
    "SquadParagraph",
    "SquadArticle",
    "SquadDataset",
    "BinaryInstance",
    "PairInstance",
    "StrategyKind",
    "ContextStrategy",
]


@dataclass
class Output:
    """Structured output from commands for consistent display and testing."""

    success: bool
    message: str = ""
    data: dict[str, Any] | None = None
    details: list[dict[str, Any]] | None = None
    next_steps: list[str] | None = None
    exit_code: int = 0

    def __post_init__(self):
        if not self.success and self.exit_code == 0:
            self.exit_code = 1


class QuestionType(StrEnum):
    YESNO = "yesno"
    FACTOID = "factoid"
    LIST = "list"


@dataclass(frozen=True, slots=True)
class Snippet:
    """A human-annotated passage attached to a question."""

    text: str
    document_id: str
    source_offsets: tuple[int, int] | None = None


@dataclass(frozen=True, slots=True)
class GoldAnswer:
    """Gold answer: a yes/no label or a tuple of synonym lists."""

    yes_label: bool | None = None
    items: tuple[tuple[str, ...], ...] = ()


@dataclass(frozen=True)
class BioasqQuestion:
    id: str
    body: str
    qtype: QuestionType
    gold: GoldAnswer
    snippets: tuple[Snippet, ...] = ()
    abstracts: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        # Read-only view so the record stays immutable after construction
        object.__setattr__(self, "abstracts", MappingProxyType(dict(self.abstracts)))


@dataclass(frozen=True)
class BioasqCorpus:
    """Parsed BioASQ file: supported questions plus what was skipped."""

    questions: tuple[BioasqQuestion, ...]
    skipped_summary: int = 0

    def __iter__(self) -> Iterator[BioasqQuestion]:
        return iter(self.questions)

    def __len__(self) -> int:
        return len(self.questions)

    def by_type(self, qtype: QuestionType) -> list[BioasqQuestion]:
        return [q for q in self.questions if q.qtype == qtype]


@dataclass(frozen=True, slots=True)
class AnswerSpan:
    """Character span [start_char, end_char) with the text it should cover."""

    start_char: int
    end_char: int
    text: str

    def __post_init__(self):
        if self.start_char < 0:
            raise ValueError(f"start_char must be >= 0, got {self.start_char}")
        if self.end_char < self.start_char:
            raise ValueError(
                f"end_char {self.end_char} precedes start_char {self.start_char}"
            )

    @classmethod
    def at(cls, start_char: int, text: str) -> "AnswerSpan":
        """Span for ``text`` starting at ``start_char`` (SQuAD convention)."""
        return cls(start_char, start_char + len(text), text)

    def matches(self, context: str) -> bool:
        """Substring invariant: the context slice equals the text exactly."""
        return (
            0 <= self.start_char < self.end_char <= len(context)
            and context[self.start_char : self.end_char] == self.text
        )


@dataclass(frozen=True, slots=True)
class SquadInstance:
    id: str
    question: str
    context: str
    answers: tuple[AnswerSpan, ...] = ()
    is_impossible: bool = False

    @property
    def offsets_valid(self) -> bool:
        """True when every answer satisfies the substring invariant."""
        return all(span.matches(self.context) for span in self.answers)

    @property
    def flagged(self) -> bool:
        return not self.offsets_valid


@dataclass(frozen=True, slots=True)
class SquadParagraph:
    context: str
    qas: tuple[SquadInstance, ...]


@dataclass(frozen=True, slots=True)
class SquadArticle:
    title: str
    paragraphs: tuple[SquadParagraph, ...]


@dataclass(frozen=True, slots=True)
class SquadDataset:
    version: str = "v1.1"
    articles: tuple[SquadArticle, ...] = ()

    def instances(self) -> Iterator[SquadInstance]:
        for article in self.articles:
            for paragraph in article.paragraphs:
                yield from paragraph.qas

    def __len__(self) -> int:
        return sum(len(p.qas) for a in self.articles for p in a.paragraphs)

    def flagged_ids(self) -> list[str]:
        return [inst.id for inst in self.instances() if inst.flagged]

    @classmethod
    def from_instances(
        cls,
        instances: list[SquadInstance],
        title: str = "bioqakit",
        version: str = "v1.1",
    ) -> "SquadDataset":
        """Group instances into paragraphs by consecutive identical context."""
        paragraphs: list[SquadParagraph] = []
        current: list[SquadInstance] = []
        for inst in instances:
            if current and current[-1].context != inst.context:
                paragraphs.append(SquadParagraph(current[0].context, tuple(current)))
                current = []
            current.append(inst)
        if current:
            paragraphs.append(SquadParagraph(current[0].context, tuple(current)))
        articles = (SquadArticle(title, tuple(paragraphs)),) if paragraphs else ()
        return cls(version=version, articles=articles)


@dataclass(frozen=True, slots=True)
class BinaryInstance:
    """Yes/No training unit: (question, context) with a yes label."""

    id: str
    question: str
    context: str
    label: bool


@dataclass(frozen=True, slots=True)
class PairInstance:
    """Sentence-pair classification unit (entailment = True)."""

    id: str
    premise: str
    hypothesis: str
    label: bool


class StrategyKind(StrEnum):
    SNIPPET = "snippet"
    ABSTRACT = "abstract"
    APPENDED = "appended"


@dataclass(frozen=True, slots=True)
class ContextStrategy:
    """How contexts are built from a question's snippets and abstracts."""

    kind: StrategyKind = StrategyKind.SNIPPET
    window: int = 1

    def __post_init__(self):
        if self.window < 0:
            raise ValueError(f"window must be >= 0, got {self.window}")

    @classmethod
    def snippet_as_is(cls) -> "ContextStrategy":
        return cls(StrategyKind.SNIPPET, 0)

    @classmethod
    def full_abstract(cls) -> "ContextStrategy":
        return cls(StrategyKind.ABSTRACT, 0)

    @classmethod
    def appended_snippet(cls, window: int = 1) -> "ContextStrategy":
        return cls(StrategyKind.APPENDED, window)

    @property
    def label(self) -> str:
        if self.kind == StrategyKind.APPENDED:
            return f"{self.kind.value}:{self.window}"
        return self.kind.value
