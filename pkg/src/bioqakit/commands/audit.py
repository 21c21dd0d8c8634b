"""Audit command: how many factoid and list questions lack an exact snippet match."""

from pathlib import Path
from typing import Any

from ..answerability import audit as run_audit
from ..answerability import format_rate
from ..decorators import arg, command
from ..errors import SchemaError
from ..formats import parse_bioasq
from ..manifest import write_manifest
from ..models import Context, Output
from ..utils import dump_json, load_json, read_bytes, write_bytes


def load_batch_labels(data: bytes) -> dict[str, str]:
    """Read ``{id: batch}`` or ``{batch: [ids]}`` into an id -> batch mapping."""
    root = load_json(data)
    if not isinstance(root, dict):
        raise SchemaError("Batch labels must be a JSON object")
    labels: dict[str, str] = {}
    for key, value in root.items():
        if isinstance(value, str):
            labels[key] = value
        elif isinstance(value, list) and all(isinstance(v, str) for v in value):
            for qid in value:
                labels[qid] = key
        else:
            raise SchemaError("Expected a batch name or a list of ids", field=key)
    return labels


@command(
    "audit",
    "Count factoid and list questions without an exact snippet match",
    arguments=(
        arg("--in", dest="inputs", type=Path, nargs="+", required=True, help="BioASQ golden file(s)"),
        arg("--batches", type=Path, help="JSON mapping of question ids to batch names"),
        arg("--out", type=Path, help="Write the audit report here"),
    ),
)
def audit(
    ctx: Context, inputs: list[Path], batches: Path | None = None, out: Path | None = None
) -> Output:
    """Audit one or more golden files.

    With several inputs and no ``--batches`` file, each file is its own batch
    named after its stem.
    """
    paths = [ctx.resolve(p) for p in inputs]
    labels: dict[str, str] = {}
    questions = []
    for path in paths:
        corpus = parse_bioasq(read_bytes(path))
        if len(paths) > 1:
            labels.update({q.id: path.stem for q in corpus.questions})
        questions.extend(corpus.questions)
    if batches:
        batch_path = ctx.resolve(batches)
        labels.update(load_batch_labels(read_bytes(batch_path)))
        paths.append(batch_path)

    report = run_audit(questions, labels)
    payload: dict[str, Any] = report.to_dict()

    details = []
    for (batch, qtype), row in report.rows.items():
        line = f"{batch} {qtype}: {row.unanswerable}/{row.total} = {format_rate(row.rate):.3f}"
        details.append({"type": "warning" if row.unanswerable else "success", "content": line})

    if out:
        out_path = ctx.resolve(out)
        write_bytes(out_path, dump_json(payload, pretty=True))
        write_manifest(ctx, "audit", paths, [out_path])

    return Output(
        success=True,
        message=f"Audited {len(report.results)} factoid/list question(s)",
        data=payload,
        details=details,
    )
