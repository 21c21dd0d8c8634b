"""Sentence-pair classification data (the NLI-role training stage)."""

from ..errors import SchemaError
from ..models import PairInstance
from ..utils import dump_json, load_json

ENTAILMENT = "entailment"
NOT_ENTAILMENT = "not_entailment"


def parse_pairs(data: bytes) -> list[PairInstance]:
    """Parse ``{"data": [{"id", "premise", "hypothesis", "label"}]}``.

    Three-way NLI labels are collapsed: "entailment" is positive, "neutral"
    and "contradiction" count as not entailed.
    """
    root = load_json(data)
    records = root.get("data") if isinstance(root, dict) else None
    if not isinstance(records, list):
        raise SchemaError("Expected a top-level 'data' array", field="data")

    pairs = []
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise SchemaError("Pair record must be an object", index=index)
        for name in ("id", "premise", "hypothesis", "label"):
            if not isinstance(record.get(name), str):
                raise SchemaError("Missing required field", field=name, index=index)
        label = record["label"].strip().lower()
        if label not in (ENTAILMENT, NOT_ENTAILMENT, "neutral", "contradiction"):
            raise SchemaError(f"Unknown label '{label}'", field="label", index=index)
        pairs.append(
            PairInstance(
                id=record["id"],
                premise=record["premise"],
                hypothesis=record["hypothesis"],
                label=label == ENTAILMENT,
            )
        )
    return pairs


def write_pairs(pairs: list[PairInstance]) -> bytes:
    return dump_json(
        {
            "data": [
                {
                    "id": p.id,
                    "premise": p.premise,
                    "hypothesis": p.hypothesis,
                    "label": ENTAILMENT if p.label else NOT_ENTAILMENT,
                }
                for p in pairs
            ]
        }
    )
