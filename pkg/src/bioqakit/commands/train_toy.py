"""Train-toy command: run transfer plans on the deterministic toy encoder."""

from pathlib import Path

from ..constants import ARROW
from ..decorators import arg, command
from ..formats import parse_bioasq
from ..harness import PlanResult, compare_plans, parse_plan, run_plan, write_run
from ..manifest import manifest_path, write_manifest
from ..models import Context, Output
from ..utils import dump_json, read_bytes, write_bytes


def _run_one(ctx: Context, plan_file: Path, golden: Path | None) -> tuple[PlanResult, list[Path]]:
    path = ctx.resolve(plan_file)
    plan = parse_plan(read_bytes(path), path.parent, default_seed=ctx.config.seed)
    golden_path = ctx.resolve(golden) if golden else plan.golden
    questions = parse_bioasq(read_bytes(golden_path)).questions if golden_path else None
    inputs = [path] + [stage.data for stage in plan.stages]
    if golden_path:
        inputs.append(golden_path)
    return run_plan(plan, questions, ctx.config), inputs


@command(
    "train-toy",
    "Run staged fine-tuning on the toy encoder and record losses and checksums",
    arguments=(
        arg("--plan", type=Path, required=True, help="Transfer plan JSON"),
        arg("--vs", type=Path, help="Second plan to compare with, e.g. the swapped stage order"),
        arg("--out", type=Path, required=True, help="Output directory"),
        arg("--golden", type=Path, help="BioASQ golden file (overrides the plans' own)"),
        arg("--seed", type=int, help="Seed for plans and stages that do not set one"),
    ),
)
def train_toy(
    ctx: Context, plan: Path, out: Path, vs: Path | None = None, golden: Path | None = None
) -> Output:
    """Run one plan, or two for an order comparison."""
    out_dir = ctx.resolve(out)
    runs = [_run_one(ctx, plan, golden)]
    if vs:
        runs.append(_run_one(ctx, vs, golden))

    inputs: list[Path] = []
    outputs: list[Path] = []
    used: set[str] = set()
    details = []
    for index, (result, plan_inputs) in enumerate(runs):
        name = result.plan.name if result.plan.name not in used else f"{result.plan.name}-{index}"
        used.add(name)
        outputs += write_run(result, out_dir / name)
        inputs += [p for p in plan_inputs if p not in inputs]

        details.append({"type": "info", "content": f"{name}: {f' {ARROW} '.join(result.plan.order)}"})
        for stage in result.stages:
            details.append(
                {
                    "type": "text",
                    "content": f"{stage.name} loss {stage.initial_loss:.4f} {ARROW} "
                    f"{stage.losses[-1] if stage.losses else stage.initial_loss:.4f}",
                }
            )
        if result.metrics:
            details.append(
                {"type": "metric", "name": f"{name} macro average", "value": result.metrics.macro_average}
            )

    data = {"runs": [result.to_dict() for result, _ in runs]}
    if len(runs) == 2:
        comparison = compare_plans(runs[0][0], runs[1][0])
        comparison_path = out_dir / "comparison.json"
        write_bytes(comparison_path, dump_json(comparison, pretty=True))
        outputs.append(comparison_path)
        data["comparison"] = comparison
        same = comparison["same_final_checksum"]
        details.append(
            {
                "type": "info",
                "content": "Final encoders are identical" if same else "Final encoders differ",
            }
        )

    manifest = write_manifest(ctx, "train-toy", inputs, outputs, target=manifest_path(out_dir))
    return Output(
        success=True,
        message=f"Ran {len(runs)} plan(s) into {out_dir}",
        data={**data, "manifest": str(manifest)},
        details=details,
    )
