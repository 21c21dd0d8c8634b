"""Dataset invariant checks and the workflow runner."""

from bioqakit.checks.dataset import check_gold_answers, check_snippets, check_unique_ids, validate_dataset
from bioqakit.checks.squad import check_answer_boundaries, check_answer_offsets, check_answered
from bioqakit.config import PipelineConfig, RunContext
from bioqakit.formats import parse_squad
from bioqakit.models import GoldAnswer, Output, QuestionType
from bioqakit.workflows import Workflow

from conftest import make_question


class TestValidateDataset:
    def test_clean(self):
        assert validate_dataset([make_question("a"), make_question("b")]) == []

    def test_rules(self):
        questions = [
            make_question("a"),
            make_question("a"),
            make_question("f", items=(("x",), ("y",))),
            make_question("l", QuestionType.LIST, items=()),
            make_question("y", QuestionType.YESNO),
            make_question("s", snippets=()),
            make_question("e", items=(("x", ""),)),
        ]
        found = {(v.question_id, v.invariant) for v in validate_dataset(questions)}
        assert found == {
            ("a", "unique-id"),
            ("f", "factoid-items"),
            ("l", "list-items"),
            ("y", "yesno-label"),
            ("s", "snippets"),
            ("e", "synonyms"),
        }

    def test_duplicate_names_first_record(self):
        (violation,) = validate_dataset([make_question("a"), make_question("a")])
        assert violation.index == 1
        assert "record 0" in violation.message

    def test_extractive_label(self):
        question = make_question()
        question = type(question)(
            question.id, question.body, question.qtype, GoldAnswer(True, question.gold.items), question.snippets
        )
        assert [v.invariant for v in validate_dataset([question])] == ["extractive-label"]


class TestCheckOutputs:
    def test_exit_code_on_failure(self, ctx):
        result = check_gold_answers(ctx, [make_question(items=())])
        assert not result.success
        assert result.exit_code == 5
        assert check_snippets(ctx, [make_question()]).success
        assert check_unique_ids(ctx, [make_question(), make_question()]).exit_code == 5

    def test_squad_checks(self, ctx, fixtures_dir):
        dataset = parse_squad((fixtures_dir / "squad_sample.json").read_bytes())
        offsets = check_answer_offsets(ctx, dataset)
        assert not offsets.success
        assert offsets.data == {"flagged": ["a2"]}
        assert check_answered(ctx, dataset).success

        boundaries = check_answer_boundaries(ctx, dataset)
        assert not boundaries.success
        assert boundaries.data == {"mid_token": ["b1"]}
        relaxed = RunContext(ctx.root, PipelineConfig(boundary_required=False))
        assert check_answer_boundaries(relaxed, dataset).success


def _passing(ctx, **kwargs) -> Output:
    return Output(success=True, message="fine", data={"n": kwargs["n"]})


def _failing(ctx, **kwargs) -> Output:
    return Output(success=False, message="broken", details=[{"type": "error", "content": "x"}], exit_code=5)


def _crashing(ctx, **kwargs) -> Output:
    raise RuntimeError("boom")


class TestWorkflow:
    def test_checks_collect_failures(self, ctx):
        result = Workflow("w").check(_passing).check(_failing).run(ctx, n=3)
        assert not result.success
        assert result.exit_code == 5
        assert result.data == {"_passing": {"n": 3}}
        assert [d["name"] for d in result.details] == ["_passing", "_failing"]

    def test_parallel_keeps_order_and_catches_crashes(self, ctx):
        result = Workflow("w").parallel(_passing, _crashing, _passing).run(ctx, n=1)
        assert not result.success
        assert [d["name"] for d in result.details] == ["_passing", "_crashing", "_passing"]
        assert "boom" in result.details[1]["message"]

    def test_all_pass(self, ctx):
        assert Workflow("w").check(_passing).run(ctx, n=0).success
