"""Reader for BioASQ Phase-B JSON (training and golden files)."""

import logging
from typing import Any

from ..errors import SchemaError
from ..models import (
    BioasqCorpus,
    BioasqQuestion,
    GoldAnswer,
    QuestionType,
    Snippet,
)
from ..utils import load_json

LOG = logging.getLogger(__name__)

_TYPES = {
    "yesno": QuestionType.YESNO,
    "factoid": QuestionType.FACTOID,
    "list": QuestionType.LIST,
}


def parse_bioasq(data: bytes) -> BioasqCorpus:
    """Parse a BioASQ file into questions.

    Summary questions are counted and skipped. Snippet texts are kept verbatim.
    Abstracts may be given per question (``"abstracts": {doc: text}``) or in a
    top-level ``"abstracts"`` map shared by all questions.

    Raises:
        ParseError: Malformed JSON or non-UTF-8 input
        SchemaError: Missing or mistyped required field
    """
    root = load_json(data)
    if not isinstance(root, dict) or not isinstance(root.get("questions"), list):
        raise SchemaError("Expected a top-level 'questions' array", field="questions")

    shared_abstracts = root.get("abstracts", {})
    if not isinstance(shared_abstracts, dict):
        raise SchemaError("'abstracts' must map document ids to text", field="abstracts")

    questions: list[BioasqQuestion] = []
    skipped = 0
    for index, entry in enumerate(root["questions"]):
        if not isinstance(entry, dict):
            raise SchemaError("Question entry must be an object", index=index)

        qtype_raw = _require(entry, "type", str, index).strip().lower()
        if qtype_raw == "summary":
            skipped += 1
            continue
        if qtype_raw not in _TYPES:
            raise SchemaError(f"Unsupported question type '{qtype_raw}'", field="type", index=index)

        questions.append(_parse_question(entry, _TYPES[qtype_raw], shared_abstracts, index))

    if skipped:
        LOG.warning("Skipped %d summary question(s)", skipped)
    return BioasqCorpus(questions=tuple(questions), skipped_summary=skipped)


def _parse_question(
    entry: dict[str, Any],
    qtype: QuestionType,
    shared_abstracts: dict[str, str],
    index: int,
) -> BioasqQuestion:
    qid = _require(entry, "id", str, index)
    body = _require(entry, "body", str, index)
    if "exact_answer" not in entry:
        raise SchemaError("Missing required field", field="exact_answer", index=index)

    snippets_raw = entry.get("snippets", [])
    if not isinstance(snippets_raw, list):
        raise SchemaError("'snippets' must be a list", field="snippets", index=index)
    snippets = tuple(_parse_snippet(s, index) for s in snippets_raw)

    abstracts = dict(entry.get("abstracts", {}))
    for snippet in snippets:
        doc = snippet.document_id
        if doc not in abstracts and doc in shared_abstracts:
            abstracts[doc] = shared_abstracts[doc]

    return BioasqQuestion(
        id=qid,
        body=body,
        qtype=qtype,
        gold=_parse_gold(entry["exact_answer"], qtype, index),
        snippets=snippets,
        abstracts=abstracts,
    )


def _parse_snippet(raw: Any, index: int) -> Snippet:
    if not isinstance(raw, dict):
        raise SchemaError("Snippet must be an object", field="snippets", index=index)
    text = _require(raw, "text", str, index)
    document = _require(raw, "document", str, index)

    offsets = None
    begin = raw.get("offsetInBeginSection")
    end = raw.get("offsetInEndSection")
    # Offsets only address the abstract when both ends sit in it
    sections = {raw.get("beginSection", "abstract"), raw.get("endSection", "abstract")}
    if isinstance(begin, int) and isinstance(end, int) and sections == {"abstract"}:
        offsets = (begin, end)
    return Snippet(text=text, document_id=document, source_offsets=offsets)


def _parse_gold(raw: Any, qtype: QuestionType, index: int) -> GoldAnswer:
    if qtype == QuestionType.YESNO:
        if isinstance(raw, list) and len(raw) == 1:
            raw = raw[0]
        if not isinstance(raw, str) or raw.strip().lower() not in ("yes", "no"):
            raise SchemaError("Yes/no exact_answer must be 'yes' or 'no'", field="exact_answer", index=index)
        return GoldAnswer(yes_label=raw.strip().lower() == "yes")

    if isinstance(raw, str):
        raw = [raw]
    if not isinstance(raw, list):
        raise SchemaError("exact_answer must be a string or a list", field="exact_answer", index=index)

    if qtype == QuestionType.FACTOID:
        # Editions differ: ["a", "b"] and [["a"], ["b"]] both list synonyms of one answer
        synonyms: list[str] = []
        for value in raw:
            for synonym in value if isinstance(value, list) else [value]:
                _check_synonym(synonym, index)
                if synonym not in synonyms:
                    synonyms.append(synonym)
        return GoldAnswer(items=(tuple(synonyms),) if synonyms else ())

    items: list[tuple[str, ...]] = []
    for value in raw:
        group = value if isinstance(value, list) else [value]
        for synonym in group:
            _check_synonym(synonym, index)
        items.append(tuple(group))
    return GoldAnswer(items=tuple(items))


def _check_synonym(value: Any, index: int) -> None:
    if not isinstance(value, str):
        raise SchemaError("Answer synonyms must be strings", field="exact_answer", index=index)


def _require(entry: dict[str, Any], name: str, kind: type, index: int) -> Any:
    if name not in entry:
        raise SchemaError("Missing required field", field=name, index=index)
    value = entry[name]
    if not isinstance(value, kind):
        raise SchemaError(f"Field must be of type {kind.__name__}", field=name, index=index)
    return value
