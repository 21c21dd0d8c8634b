"""Toy encoder, staged training and plan runs."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from bioqakit.config import PipelineConfig
from bioqakit.errors import SchemaError, StageError
from bioqakit.formats import parse_bioasq
from bioqakit.heads import SpanHead, YesNoHead, grad_check, yesno_loss_and_grads
from bioqakit.harness import (
    Example,
    Model,
    TaskKind,
    ToyEncoder,
    TrainingStage,
    TransferPlan,
    compare_plans,
    dataset_loss,
    encode,
    load_examples,
    parse_plan,
    run_plan,
    train_stage,
    write_run,
)


def _stage(fixtures: Path, kind: TaskKind, **kwargs) -> TrainingStage:
    data = {TaskKind.PAIR: "pairs.json", TaskKind.YESNO: "yesno_train.json", TaskKind.SPAN: "span_train.json"}
    return TrainingStage(name=str(kind), task_kind=kind, data=fixtures / data[kind], **kwargs)


def _plan(fixtures: Path, name: str) -> TransferPlan:
    path = fixtures / name
    return parse_plan(path.read_bytes(), path.parent)


class TestToyEncoder:
    def test_layout(self):
        encoder = ToyEncoder.create(buckets=64, hidden_size=4)
        states = encode(encoder, "Is it?", "CFTR conducts chloride.")
        assert states.seq_len == 2 + 3 + 3
        assert states.hidden_size == 4
        assert states.offsets[0] is None
        assert states.offsets[4] == (0, 4)
        assert states.offsets[-1] is None

    def test_empty_side_rejected(self):
        with pytest.raises(ValueError):
            encode(ToyEncoder.create(buckets=64, hidden_size=4), "   ", "context")

    def test_seeded(self):
        a = ToyEncoder.create(buckets=64, hidden_size=4, seed=3)
        b = ToyEncoder.create(buckets=64, hidden_size=4, seed=3)
        c = ToyEncoder.create(buckets=64, hidden_size=4, seed=4)
        assert a.checksum() == b.checksum() != c.checksum()

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        encoder = ToyEncoder.create(buckets=32, hidden_size=4)
        head = YesNoHead.normal(4, rng, scale=1.0)
        features, _ = encoder.layout("Is aspirin an NSAID?", "Aspirin is an NSAID.")

        def objective(flat):
            encoder.weight = flat.reshape(4, 4)
            trace = encoder.forward(features)
            loss, _, _, d_cls = yesno_loss_and_grads(trace.hidden[0], head, True)
            d_hidden = np.zeros_like(trace.hidden)
            d_hidden[0] = d_cls
            _, d_weight, _ = encoder.backward(trace, d_hidden)
            return loss, d_weight

        assert grad_check(objective, encoder.weight.copy()).passed


class TestParsePlan:
    def test_fixture(self, fixtures_dir):
        plan = _plan(fixtures_dir, "plan_forward.json")
        assert plan.order == ["nli", "factoid"]
        assert plan.stages[0].task_kind == TaskKind.PAIR
        assert plan.stages[1].data == fixtures_dir / "span_train.json"
        assert (plan.buckets, plan.hidden_size) == (256, 8)

    def test_default_seed_fills_missing(self, tmp_path):
        raw = {"stages": [{"name": "s", "task": "pair", "data": "x.json"}]}
        plan = parse_plan(json.dumps(raw).encode(), tmp_path, default_seed=99)
        assert plan.stages[0].seed == 99
        assert plan.encoder_seed == 99

    @pytest.mark.parametrize(
        "stage",
        [
            {"name": "s", "task": "pair"},
            {"name": "s", "task": "summarize", "data": "x.json"},
            {"name": "s", "task": "pair", "data": "x.json", "epochs": 0},
            {"name": "s", "task": "pair", "data": "x.json", "batch_size": 0},
            {"name": "s", "task": "pair", "data": "x.json", "learning_rate": -1},
            {"name": "s", "task": "pair", "data": "x.json", "head_policy": "borrow"},
        ],
    )
    def test_rejects_bad_stages(self, stage, tmp_path):
        with pytest.raises(SchemaError):
            parse_plan(json.dumps({"stages": [stage]}).encode(), tmp_path)

    def test_empty_plan(self, tmp_path):
        with pytest.raises(SchemaError):
            parse_plan(b'{"stages": []}', tmp_path)


class TestTrainStage:
    def test_zero_head_starts_at_ln2(self, fixtures_dir):
        model = Model(ToyEncoder.create(buckets=128, hidden_size=8))
        stage = _stage(fixtures_dir, TaskKind.YESNO, learning_rate=0.0)
        result = train_stage(model, stage, load_examples(stage, model.encoder))
        assert result.initial_loss == pytest.approx(math.log(2))

    def test_zero_learning_rate_is_a_no_op(self, fixtures_dir):
        model = Model(ToyEncoder.create(buckets=128, hidden_size=8))
        stage = _stage(fixtures_dir, TaskKind.SPAN, epochs=3, learning_rate=0.0)
        result = train_stage(model, stage, load_examples(stage, model.encoder))
        assert result.start_checksum == result.end_checksum
        assert result.losses == [result.initial_loss] * 3

    def test_full_batch_small_step_lowers_loss(self, fixtures_dir):
        model = Model(ToyEncoder.create(buckets=128, hidden_size=8))
        stage = _stage(fixtures_dir, TaskKind.YESNO, epochs=1, learning_rate=0.05, batch_size=4)
        result = train_stage(model, stage, load_examples(stage, model.encoder))
        assert result.losses[0] < result.initial_loss

    def test_head_policies(self, fixtures_dir):
        model = Model(ToyEncoder.create(buckets=128, hidden_size=8))
        first = _stage(fixtures_dir, TaskKind.YESNO, learning_rate=0.05)
        train_stage(model, first, load_examples(first, model.encoder))
        trained = model.head
        assert isinstance(trained, YesNoHead) and np.any(trained.weight != 0)

        reuse = _stage(fixtures_dir, TaskKind.PAIR, learning_rate=0.0, head_policy="reuse")
        train_stage(model, reuse, load_examples(reuse, model.encoder))
        assert model.head is trained

        fresh = _stage(fixtures_dir, TaskKind.PAIR, learning_rate=0.0)
        train_stage(model, fresh, load_examples(fresh, model.encoder))
        assert model.head is not trained
        assert np.all(model.head.weight == 0)

        # a span stage cannot reuse a yes/no head
        span = _stage(fixtures_dir, TaskKind.SPAN, learning_rate=0.0, head_policy="reuse")
        train_stage(model, span, load_examples(span, model.encoder))
        assert isinstance(model.head, SpanHead)

    def test_empty_and_mismatched_data(self, fixtures_dir):
        model = Model(ToyEncoder.create(buckets=64, hidden_size=4))
        stage = _stage(fixtures_dir, TaskKind.SPAN)
        with pytest.raises(StageError, match="no training examples"):
            train_stage(model, stage, [])
        with pytest.raises(StageError, match="does not match"):
            train_stage(model, stage, [Example("q", "c", label=True)])

    def test_span_examples_map_to_tokens(self, fixtures_dir):
        encoder = ToyEncoder.create(buckets=64, hidden_size=4)
        examples = load_examples(_stage(fixtures_dir, TaskKind.SPAN), encoder)
        # "What does aspirin inhibit?" is 4 tokens; COX-1 is the third context token
        assert examples[0].span == (1 + 4 + 1 + 2, 1 + 4 + 1 + 2)
        model = Model(encoder, SpanHead.zeros(4))
        expected = np.mean([math.log(encode(encoder, e.first, e.second).seq_len) for e in examples])
        assert dataset_loss(model, TaskKind.SPAN, examples) == pytest.approx(expected)


class TestRunPlan:
    def test_deterministic(self, fixtures_dir):
        plan = _plan(fixtures_dir, "plan_forward.json")
        a, b = run_plan(plan), run_plan(plan)
        assert a.checksum_chain() == b.checksum_chain()
        assert a.final_checksum == b.final_checksum
        assert [s.losses for s in a.stages] == [s.losses for s in b.stages]

    def test_checksums_chain_between_stages(self, fixtures_dir):
        result = run_plan(_plan(fixtures_dir, "plan_forward.json"))
        chain = result.checksum_chain()
        assert chain[0]["end"] == chain[1]["start"]
        assert chain[-1]["end"] == result.final_checksum
        assert chain[0]["start"] != chain[0]["end"]

    def test_swapped_order_differs(self, fixtures_dir):
        forward = run_plan(_plan(fixtures_dir, "plan_forward.json"))
        swapped = run_plan(_plan(fixtures_dir, "plan_swapped.json"))
        assert forward.stages[0].start_checksum == swapped.stages[0].start_checksum
        comparison = compare_plans(forward, swapped)
        assert comparison["same_final_checksum"] is False

    def test_scores_golden_questions_for_final_head(self, fixtures_dir):
        golden = parse_bioasq((fixtures_dir / "bioasq_sample.json").read_bytes()).questions
        result = run_plan(_plan(fixtures_dir, "plan_forward.json"), golden, PipelineConfig())
        assert result.metrics is not None
        assert result.metrics.yesno is None
        assert set(result.predictions.factoid) == {"q_factoid1", "q_factoid2"}
        assert all(1 <= len(ranked) <= 5 for ranked in result.predictions.factoid.values())
        assert all(len(c) == 1 for ranked in result.predictions.factoid.values() for c in ranked)

    def test_failing_stage_is_named(self, fixtures_dir, tmp_path):
        raw = json.loads((fixtures_dir / "plan_forward.json").read_text())
        raw["stages"][1]["data"] = "missing.json"
        (tmp_path / "pairs.json").write_bytes((fixtures_dir / "pairs.json").read_bytes())
        plan = parse_plan(json.dumps(raw).encode(), tmp_path)
        with pytest.raises(StageError) as excinfo:
            run_plan(plan)
        assert excinfo.value.exit_code == 7
        assert "factoid" in excinfo.value.message

    def test_write_run(self, fixtures_dir, tmp_path):
        result = run_plan(_plan(fixtures_dir, "plan_forward.json"))
        written = write_run(result, tmp_path / "run")
        names = sorted(p.name for p in written)
        assert names == ["00-nli.loss.csv", "01-factoid.loss.csv", "checksums.json", "metrics.json"]
        csv = (tmp_path / "run" / "00-nli.loss.csv").read_text().splitlines()
        assert csv[0] == "epoch,loss"
        assert len(csv) == 1 + 1 + 2
