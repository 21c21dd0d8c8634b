"""Evaluate command: score predictions against golden BioASQ questions."""

import argparse
from pathlib import Path

from ..decorators import arg, command
from ..formats import parse_bioasq, parse_predictions
from ..manifest import write_manifest
from ..metrics import evaluate_corpus
from ..models import Context, Output
from ..utils import dump_json, read_bytes, write_bytes


@command(
    "evaluate",
    "Score a prediction file with yes/no, factoid and list metrics",
    arguments=(
        arg("--golden", type=Path, required=True, help="BioASQ golden file"),
        arg("--preds", type=Path, required=True, help="Prediction file (flat or submission shape)"),
        arg("--out", type=Path, help="Write the metrics here"),
        arg(
            "--normalize",
            action=argparse.BooleanOptionalAction,
            default=None,
            help="Compare answers after case, whitespace and edge punctuation normalization",
        ),
    ),
)
def evaluate(ctx: Context, golden: Path, preds: Path, out: Path | None = None) -> Output:
    """Evaluate predictions; unknown or mismatched ids fail the run."""
    golden_path, preds_path = ctx.resolve(golden), ctx.resolve(preds)
    corpus = parse_bioasq(read_bytes(golden_path))
    predictions = parse_predictions(read_bytes(preds_path))
    report = evaluate_corpus(corpus.questions, predictions, strict=not ctx.config.normalize)
    payload = report.to_dict()

    details = []
    if report.yesno:
        details.append({"type": "metric", "name": "Yes/no macro F1", "value": report.yesno.macro_f1})
        details.append({"type": "metric", "name": "Yes/no accuracy", "value": report.yesno.accuracy})
    if report.factoid:
        details.append({"type": "metric", "name": "Factoid MRR", "value": report.factoid.mrr})
        details.append({"type": "metric", "name": "Factoid strict acc", "value": report.factoid.sacc})
        details.append({"type": "metric", "name": "Factoid lenient acc", "value": report.factoid.lacc})
    if report.lists:
        details.append({"type": "metric", "name": "List F1", "value": report.lists.f1})
    details.append({"type": "metric", "name": "Macro average", "value": report.macro_average})

    if out:
        out_path = ctx.resolve(out)
        write_bytes(out_path, dump_json(payload, pretty=True))
        write_manifest(ctx, "evaluate", [golden_path, preds_path], [out_path])

    return Output(
        success=True,
        message=f"Scored {len(predictions)} prediction(s) against {len(corpus)} question(s)",
        data=payload,
        details=details,
    )
