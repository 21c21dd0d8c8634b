"""Stats command: context length distributions and dataset counts."""

from pathlib import Path
from typing import Any

from ..contexts import discrepancy_report, length_distribution
from ..decorators import arg, command
from ..errors import SchemaError
from ..formats import parse_binary, parse_bioasq, parse_squad, squad_statistics
from ..manifest import write_manifest
from ..models import Context, Output
from ..utils import dump_json, load_json, read_bytes, write_bytes


def detect_format(data: bytes) -> str:
    """Tell BioASQ, SQuAD and yes/no instance files apart by their top level."""
    root = load_json(data)
    if isinstance(root, dict) and isinstance(root.get("questions"), list):
        return "bioasq"
    records = root.get("data") if isinstance(root, dict) else None
    if isinstance(records, list):
        if not records or isinstance(records[0], dict) and "paragraphs" in records[0]:
            return "squad"
        return "binary"
    raise SchemaError("Not a BioASQ, SQuAD or yes/no instance file")


def _describe(data: bytes) -> tuple[str, list[str], dict[str, Any]]:
    kind = detect_format(data)
    match kind:
        case "squad":
            dataset = parse_squad(data)
            contexts = [inst.context for inst in dataset.instances()]
            counts = squad_statistics(dataset).to_dict()
        case "binary":
            instances = parse_binary(data)
            contexts = [inst.context for inst in instances]
            yes = sum(1 for inst in instances if inst.label)
            counts = {"instances": len(instances), "yes": yes, "no": len(instances) - yes}
        case _:
            corpus = parse_bioasq(data)
            contexts = [s.text for q in corpus.questions for s in q.snippets]
            counts = {
                "questions": len(corpus),
                "snippets": len(contexts),
                "skipped_summary": corpus.skipped_summary,
            }
    return kind, contexts, counts


@command(
    "stats",
    "Summarize context lengths, optionally against a second file",
    arguments=(
        arg("--in", dest="input", type=Path, required=True, help="BioASQ, SQuAD or yes/no file"),
        arg("--vs", type=Path, help="Second file to compare length distributions with"),
        arg("--out", type=Path, help="Write the statistics here"),
    ),
)
def stats(ctx: Context, input: Path, vs: Path | None = None, out: Path | None = None) -> Output:
    """Length distribution of one file, plus the discrepancy to another."""
    paths = [ctx.resolve(input)] + ([ctx.resolve(vs)] if vs else [])
    described = []
    for path in paths:
        kind, contexts, counts = _describe(read_bytes(path))
        described.append(
            {"path": str(path), "format": kind, "counts": counts, "lengths": length_distribution(contexts)}
        )

    details = [
        {
            "type": "info",
            "content": f"{Path(entry['path']).name}: {entry['lengths'].total} context(s), "
            f"mean {entry['lengths'].mean:.1f} tokens",
        }
        for entry in described
    ]
    payload: dict[str, Any] = {
        "files": [{**entry, "lengths": entry["lengths"].to_dict()} for entry in described]
    }
    if len(described) == 2:
        first, second = described[0]["lengths"], described[1]["lengths"]
        if not first.total or not second.total:
            return Output(
                success=False,
                message="Cannot compare an empty file",
                data=payload,
                exit_code=3,
            )
        discrepancy = discrepancy_report(first, second)
        payload["discrepancy"] = discrepancy.to_dict()
        details.append(
            {"type": "metric", "name": "Mean difference", "value": discrepancy.mean_difference}
        )
        details.append(
            {"type": "metric", "name": "L1 distance", "value": discrepancy.l1_distance}
        )

    if out:
        out_path = ctx.resolve(out)
        write_bytes(out_path, dump_json(payload, pretty=True))
        write_manifest(ctx, "stats", paths, [out_path])

    return Output(
        success=True,
        message=f"Statistics for {len(described)} file(s)",
        data=payload,
        details=details,
    )
