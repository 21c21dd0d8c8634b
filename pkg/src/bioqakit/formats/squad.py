"""SQuAD-style readers and writers, plus the yes/no instance format."""

import logging
from dataclasses import dataclass
from typing import Any

from ..constants import SQUAD_VERSION
from ..errors import SchemaError
from ..models import (
    AnswerSpan,
    BinaryInstance,
    SquadArticle,
    SquadDataset,
    SquadInstance,
    SquadParagraph,
)
from ..utils import dump_json, load_json

LOG = logging.getLogger(__name__)


def parse_squad(data: bytes) -> SquadDataset:
    """Parse SQuAD v1.1 (or v2.0, read-only) JSON.

    Answers whose offsets do not point at their text are loaded as-is; the
    instance reports ``flagged`` so filtering stays an explicit step.

    Raises:
        ParseError: Malformed JSON
        SchemaError: Missing fields or a negative answer_start
    """
    root = load_json(data)
    if not isinstance(root, dict) or not isinstance(root.get("data"), list):
        raise SchemaError("Expected a top-level 'data' array", field="data")

    version = root.get("version", SQUAD_VERSION)
    if not isinstance(version, str):
        raise SchemaError("'version' must be a string", field="version")

    articles = []
    counter = 0
    for a_index, article in enumerate(root["data"]):
        paragraphs = []
        for paragraph in _list(article, "paragraphs", a_index):
            context = _field(paragraph, "context", str, a_index)
            qas = []
            for qa in _list(paragraph, "qas", a_index):
                qas.append(_parse_qa(qa, context, counter))
                counter += 1
            paragraphs.append(SquadParagraph(context=context, qas=tuple(qas)))
        title = article.get("title", "") if isinstance(article, dict) else ""
        articles.append(SquadArticle(title=title, paragraphs=tuple(paragraphs)))

    dataset = SquadDataset(version=version, articles=tuple(articles))
    flagged = dataset.flagged_ids()
    if flagged:
        LOG.warning("%d instance(s) have answer offsets that do not match the context", len(flagged))
    return dataset


def _parse_qa(qa: Any, context: str, index: int) -> SquadInstance:
    qid = _field(qa, "id", str, index)
    question = _field(qa, "question", str, index)
    answers = []
    for answer in _list(qa, "answers", index):
        text = _field(answer, "text", str, index)
        start = _field(answer, "answer_start", int, index)
        if start < 0:
            raise SchemaError(f"Negative answer_start {start} for '{qid}'", field="answer_start", index=index)
        answers.append(AnswerSpan.at(start, text))
    return SquadInstance(
        id=qid,
        question=question,
        context=context,
        answers=tuple(answers),
        is_impossible=bool(qa.get("is_impossible", False)),
    )


def write_squad(dataset: SquadDataset) -> bytes:
    """Serialize with SQuAD key order; UTF-8, newline-terminated.

    Raises:
        SchemaError: If the dataset holds unanswerable (v2.0) instances
    """
    data = []
    for article in dataset.articles:
        paragraphs = []
        for paragraph in article.paragraphs:
            qas = []
            for inst in paragraph.qas:
                if inst.is_impossible:
                    raise SchemaError(
                        f"Instance '{inst.id}' is unanswerable; only answered datasets can be written",
                        field="is_impossible",
                    )
                qas.append(
                    {
                        "id": inst.id,
                        "question": inst.question,
                        "answers": [
                            {"text": span.text, "answer_start": span.start_char}
                            for span in inst.answers
                        ],
                    }
                )
            paragraphs.append({"context": paragraph.context, "qas": qas})
        data.append({"title": article.title, "paragraphs": paragraphs})
    return dump_json({"version": dataset.version, "data": data})


@dataclass(frozen=True)
class SquadStatistics:
    """Instance counts in the shape of a dataset statistics table."""

    version: str
    articles: int
    paragraphs: int
    instances: int
    answered: int
    unanswerable: int
    flagged: int

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def squad_statistics(dataset: SquadDataset) -> SquadStatistics:
    instances = list(dataset.instances())
    unanswerable = sum(1 for inst in instances if inst.is_impossible or not inst.answers)
    return SquadStatistics(
        version=dataset.version,
        articles=len(dataset.articles),
        paragraphs=sum(len(a.paragraphs) for a in dataset.articles),
        instances=len(instances),
        answered=len(instances) - unanswerable,
        unanswerable=unanswerable,
        flagged=sum(1 for inst in instances if inst.flagged),
    )


def parse_binary(data: bytes) -> list[BinaryInstance]:
    """Parse the yes/no instance file written by ``write_binary``."""
    root = load_json(data)
    records = root.get("data") if isinstance(root, dict) else None
    if not isinstance(records, list):
        raise SchemaError("Expected a top-level 'data' array", field="data")

    instances = []
    for index, record in enumerate(records):
        answer = _field(record, "answer", str, index).strip().lower()
        if answer not in ("yes", "no"):
            raise SchemaError("answer must be 'yes' or 'no'", field="answer", index=index)
        instances.append(
            BinaryInstance(
                id=_field(record, "id", str, index),
                question=_field(record, "question", str, index),
                context=_field(record, "context", str, index),
                label=answer == "yes",
            )
        )
    return instances


def write_binary(instances: list[BinaryInstance]) -> bytes:
    return dump_json(
        {
            "version": SQUAD_VERSION,
            "data": [
                {
                    "id": inst.id,
                    "question": inst.question,
                    "context": inst.context,
                    "answer": "yes" if inst.label else "no",
                }
                for inst in instances
            ],
        }
    )


def _field(record: Any, name: str, kind: type, index: int) -> Any:
    if not isinstance(record, dict) or name not in record:
        raise SchemaError("Missing required field", field=name, index=index)
    value = record[name]
    # bool is an int subclass; offsets must be real integers
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaError(f"Field must be of type {kind.__name__}", field=name, index=index)
    return value


def _list(record: Any, name: str, index: int) -> list[Any]:
    return _field(record, name, list, index)
