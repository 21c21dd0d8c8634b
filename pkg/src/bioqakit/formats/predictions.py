"""System-response (prediction) files."""

from dataclasses import dataclass, field
from typing import Any

from ..constants import MAX_FACTOID_CANDIDATES
from ..errors import SchemaError
from ..utils import dump_json, load_json, rejecting_duplicates

# One predicted answer with its synonyms; it is correct if any synonym is.
Candidate = tuple[str, ...]


@dataclass
class PredictionFile:
    """Predictions per question id, split by answer shape."""

    yesno: dict[str, bool] = field(default_factory=dict)
    factoid: dict[str, tuple[Candidate, ...]] = field(default_factory=dict)
    lists: dict[str, tuple[Candidate, ...]] = field(default_factory=dict)

    @property
    def ids(self) -> list[str]:
        return [*self.yesno, *self.factoid, *self.lists]

    def __len__(self) -> int:
        return len(self.yesno) + len(self.factoid) + len(self.lists)


def parse_predictions(data: bytes) -> PredictionFile:
    """Parse predictions in flat or BioASQ submission shape.

    Flat shape maps id to a value: "yes"/"no" for yes/no, a list of strings for
    a ranked factoid list, a list of lists of strings for a list answer set.
    Submission shape is ``{"questions": [{"id", "type", "exact_answer"}]}``;
    there every inner list is one candidate with its synonyms.

    Raises:
        SchemaError: Duplicate ids, unknown shapes, or a factoid list that is
            empty or longer than five
    """
    root = load_json(data, object_pairs_hook=rejecting_duplicates)
    if not isinstance(root, dict):
        raise SchemaError("Predictions must be a JSON object")

    preds = PredictionFile()
    if isinstance(root.get("questions"), list):
        for index, entry in enumerate(root["questions"]):
            _add_submission_entry(preds, entry, index)
    else:
        for index, (qid, value) in enumerate(root.items()):
            _add_flat_entry(preds, qid, value, index)
    return preds


def _add_flat_entry(preds: PredictionFile, qid: str, value: Any, index: int) -> None:
    if isinstance(value, str):
        preds.yesno[qid] = _yes_no(value, qid, index)
    elif isinstance(value, list) and all(isinstance(v, str) for v in value):
        preds.factoid[qid] = _ranked([[v] for v in value], qid, index)
    elif isinstance(value, list) and all(isinstance(v, list) for v in value):
        preds.lists[qid] = _answer_set(value, qid, index)
    else:
        raise SchemaError(f"Unrecognized prediction shape for '{qid}'", field=qid, index=index)


def _add_submission_entry(preds: PredictionFile, entry: Any, index: int) -> None:
    if not isinstance(entry, dict) or "id" not in entry or "type" not in entry:
        raise SchemaError("Submission entry needs 'id' and 'type'", index=index)
    qid, qtype = entry["id"], str(entry["type"]).lower()
    if qid in preds.ids:
        raise SchemaError(f"Duplicate prediction id '{qid}'", field="id", index=index)
    answer = entry.get("exact_answer", [])

    if qtype == "yesno":
        preds.yesno[qid] = _yes_no(answer, qid, index)
    elif qtype in ("factoid", "list"):
        if not isinstance(answer, list):
            raise SchemaError(f"'exact_answer' for '{qid}' must be a list", field="exact_answer", index=index)
        groups = [g if isinstance(g, list) else [g] for g in answer]
        if qtype == "factoid":
            preds.factoid[qid] = _ranked(groups, qid, index)
        else:
            preds.lists[qid] = _answer_set(groups, qid, index)
    elif qtype == "summary":
        return
    else:
        raise SchemaError(f"Unsupported question type '{qtype}'", field="type", index=index)


def _yes_no(value: Any, qid: str, index: int) -> bool:
    if not isinstance(value, str) or value.strip().lower() not in ("yes", "no"):
        raise SchemaError(f"Yes/no prediction for '{qid}' must be 'yes' or 'no'", field=qid, index=index)
    return value.strip().lower() == "yes"


def _candidate(group: list[Any], qid: str, index: int) -> Candidate:
    if not group or not all(isinstance(v, str) for v in group):
        raise SchemaError(f"Answers for '{qid}' must be non-empty lists of strings", field=qid, index=index)
    return tuple(group)


def _ranked(groups: list[list[Any]], qid: str, index: int) -> tuple[Candidate, ...]:
    if not 1 <= len(groups) <= MAX_FACTOID_CANDIDATES:
        raise SchemaError(
            f"Factoid prediction for '{qid}' has {len(groups)} candidates; "
            f"BioASQ expects 1 to {MAX_FACTOID_CANDIDATES}",
            field=qid,
            index=index,
        )
    return tuple(_candidate(g, qid, index) for g in groups)


def _answer_set(groups: list[list[Any]], qid: str, index: int) -> tuple[Candidate, ...]:
    answers: list[Candidate] = []
    for group in groups:
        candidate = _candidate(group, qid, index)
        if candidate not in answers:
            answers.append(candidate)
    return tuple(answers)


def write_predictions(preds: PredictionFile) -> bytes:
    """Write the flat shape when it can hold every prediction, else the submission shape.

    The flat shape has no room for factoid synonyms or an empty list answer.
    """
    synonyms = any(len(c) > 1 for ranked in preds.factoid.values() for c in ranked)
    if synonyms or not all(preds.lists.values()):
        questions: list[dict[str, Any]] = []
        for qid, label in preds.yesno.items():
            questions.append({"id": qid, "type": "yesno", "exact_answer": "yes" if label else "no"})
        for qtype, bucket in (("factoid", preds.factoid), ("list", preds.lists)):
            for qid, candidates in bucket.items():
                questions.append({"id": qid, "type": qtype, "exact_answer": [list(c) for c in candidates]})
        return dump_json({"questions": questions}, pretty=True)

    payload: dict[str, Any] = {}
    for qid, label in preds.yesno.items():
        payload[qid] = "yes" if label else "no"
    for qid, ranked in preds.factoid.items():
        payload[qid] = [c[0] for c in ranked]
    for qid, answers in preds.lists.items():
        payload[qid] = [list(c) for c in answers]
    return dump_json(payload, pretty=True)
