"""Span search, context strategies and corpus conversion."""

import numpy as np
import pytest

from bioqakit.converter import (
    build_contexts,
    convert_questions,
    convert_yesno,
    enumerate_qca_triplets,
    filter_unmatched_squad,
    find_exact_spans,
    on_boundary,
)
from bioqakit.errors import ConversionError
from bioqakit.formats import parse_bioasq, parse_squad
from bioqakit.models import ContextStrategy, QuestionType

from conftest import make_question


def _oracle(context: str, answer: str, boundary: bool) -> list[tuple[int, int]]:
    """Every start position checked by slicing, no str.find."""
    found = []
    for start in range(len(context) - len(answer) + 1):
        end = start + len(answer)
        if context[start:end] != answer:
            continue
        if boundary and (
            (start > 0 and context[start - 1].isalnum()) or (end < len(context) and context[end].isalnum())
        ):
            continue
        found.append((start, end))
    return found


class TestFindExactSpans:
    def test_boundary_rule(self):
        context = "The CFTR1 locus and CFTR gene"
        assert [(s.start_char, s.end_char) for s in find_exact_spans(context, "CFTR")] == [(20, 24)]
        relaxed = find_exact_spans(context, "CFTR", boundary_required=False)
        assert [s.start_char for s in relaxed] == [4, 20]

    def test_case_sensitive(self):
        assert find_exact_spans("cftr is here", "CFTR") == []

    def test_overlapping_occurrences(self):
        spans = find_exact_spans("aaaa", "aa", boundary_required=False)
        assert [s.start_char for s in spans] == [0, 1, 2]

    def test_punctuation_counts_as_boundary(self):
        assert len(find_exact_spans("(IL-6), IL-6.", "IL-6")) == 2
        assert on_boundary("x-IL-6", 2, 6)

    def test_empty_answer_rejected(self):
        with pytest.raises(ValueError):
            find_exact_spans("text", "")

    @pytest.mark.parametrize("boundary", [True, False])
    def test_matches_brute_force(self, boundary):
        rng = np.random.default_rng(42)
        alphabet = list("ab -.")
        for _ in range(300):
            context = "".join(rng.choice(alphabet, size=int(rng.integers(0, 25))))
            answer = "".join(rng.choice(list("ab"), size=int(rng.integers(1, 4))))
            spans = find_exact_spans(context, answer, boundary)
            assert [(s.start_char, s.end_char) for s in spans] == _oracle(context, answer, boundary)
            assert all(s.matches(context) for s in spans)


class TestContexts:
    ABSTRACT = "Background is given. The CFTR gene is mutated. Lungs are affected. Care is supportive."

    def _question(self, **kwargs):
        snippet = "The CFTR gene is mutated."
        start = self.ABSTRACT.index(snippet)
        defaults = dict(
            snippets=(snippet,),
            abstracts={"d0": self.ABSTRACT},
            offsets=((start, start + len(snippet)),),
        )
        return make_question(**{**defaults, **kwargs})

    def test_snippet_strategy(self):
        contexts = build_contexts(self._question(), ContextStrategy.snippet_as_is())
        assert [c.text for c in contexts] == ["The CFTR gene is mutated."]

    def test_full_abstract(self):
        contexts = build_contexts(self._question(), ContextStrategy.full_abstract())
        assert [c.text for c in contexts] == [self.ABSTRACT]
        assert contexts[0].provenance == "abstract:d0"

    def test_full_abstract_needs_abstracts(self):
        with pytest.raises(ConversionError):
            build_contexts(make_question(), ContextStrategy.full_abstract())

    def test_appended_window_one(self):
        context = build_contexts(self._question(), ContextStrategy.appended_snippet(1))[0]
        assert context.text == (
            "Background is given. The CFTR gene is mutated. Lungs are affected."
        )
        assert not context.fallback

    def test_appended_window_zero_is_snippet(self):
        context = build_contexts(self._question(), ContextStrategy.appended_snippet(0))[0]
        assert context.text == "The CFTR gene is mutated."

    def test_appended_window_is_clipped_to_abstract(self):
        context = build_contexts(self._question(), ContextStrategy.appended_snippet(10))[0]
        assert context.text == self.ABSTRACT

    def test_appended_falls_back_without_offsets(self):
        question = self._question(offsets=(None,))
        context = build_contexts(question, ContextStrategy.appended_snippet(1))[0]
        assert context.fallback
        assert context.text == "The CFTR gene is mutated."

    def test_appended_falls_back_on_offset_mismatch(self):
        question = self._question(offsets=((0, 10),))
        assert build_contexts(question, ContextStrategy.appended_snippet(1))[0].fallback


class TestTriplets:
    def test_one_instance_per_context_and_item(self):
        question = make_question(
            qtype=QuestionType.LIST,
            items=(("BRAF",), ("KRAS", "K-ras")),
            snippets=("BRAF and KRAS are mutated. KRAS again.", "Nothing here.", "K-ras only."),
        )
        instances = enumerate_qca_triplets(question, ContextStrategy.snippet_as_is())
        assert [i.id for i in instances] == ["q1_0_0", "q1_0_1", "q1_2_1"]
        kras = instances[1]
        assert [a.start_char for a in kras.answers] == [9, 27]
        assert all(inst.offsets_valid for inst in instances)

    def test_synonym_spans_merged_and_sorted(self):
        question = make_question(items=(("IL-6", "interleukin 6"),), snippets=("interleukin 6 (IL-6)",))
        (instance,) = enumerate_qca_triplets(question, ContextStrategy.snippet_as_is())
        assert [(a.start_char, a.text) for a in instance.answers] == [(0, "interleukin 6"), (15, "IL-6")]

    @pytest.mark.parametrize("boundary", [True, False])
    def test_matches_oracle_on_random_questions(self, boundary):
        rng = np.random.default_rng(42)

        def text(alphabet: str, low: int, high: int) -> str:
            return "".join(rng.choice(list(alphabet), size=int(rng.integers(low, high))))

        for n in range(200):
            snippets = tuple(text("abA -.", 0, 30) for _ in range(int(rng.integers(1, 7))))
            items = tuple(
                tuple(text("abA", 1, 4) for _ in range(int(rng.integers(1, 3))))
                for _ in range(int(rng.integers(1, 5)))
            )
            question = make_question(qid=f"q{n}", qtype=QuestionType.LIST, items=items, snippets=snippets)

            expected = []
            for ci, snippet in enumerate(snippets):
                for ii, item in enumerate(items):
                    spans = sorted(
                        {(start, end, synonym) for synonym in item for start, end in _oracle(snippet, synonym, boundary)}
                    )
                    if spans:
                        expected.append((f"q{n}_{ci}_{ii}", spans))

            instances = enumerate_qca_triplets(question, ContextStrategy.snippet_as_is(), boundary)
            actual = [(i.id, [(a.start_char, a.end_char, a.text) for a in i.answers]) for i in instances]
            assert actual == expected

    def test_no_match_yields_nothing(self):
        question = make_question(items=(("cftr",),))
        assert enumerate_qca_triplets(question, ContextStrategy.snippet_as_is()) == []

    def test_yesno_rejected(self):
        question = make_question(qtype=QuestionType.YESNO, yes_label=True)
        with pytest.raises(ConversionError):
            enumerate_qca_triplets(question, ContextStrategy.snippet_as_is())


class TestYesNo:
    def test_one_instance_per_snippet(self):
        question = make_question(qtype=QuestionType.YESNO, yes_label=False, snippets=("a", "b"))
        instances = convert_yesno(question)
        assert [(i.id, i.context, i.label) for i in instances] == [("q1_0", "a", False), ("q1_1", "b", False)]

    def test_missing_label(self):
        with pytest.raises(ConversionError, match="no yes/no label"):
            convert_yesno(make_question(qtype=QuestionType.YESNO))


class TestConvertQuestions:
    def test_sample_corpus(self, fixtures_dir):
        corpus = parse_bioasq((fixtures_dir / "bioasq_sample.json").read_bytes())
        result = convert_questions(corpus.questions, ContextStrategy.snippet_as_is())

        assert [i.id for i in result.dataset.instances()] == ["q_factoid1_0_0", "q_list1_0_1"]
        assert len(result.binary) == 2
        report = result.report.to_dict()
        assert report["instances_emitted"] == 4
        assert report["questions_skipped_no_match"] == 1
        assert report["per_type"]["factoid"]["questions"] == 2

    def test_threaded_matches_sequential(self, fixtures_dir):
        corpus = parse_bioasq((fixtures_dir / "bioasq_sample.json").read_bytes())
        strategy = ContextStrategy.snippet_as_is()
        sequential = convert_questions(corpus.questions, strategy)
        threaded = convert_questions(corpus.questions, strategy, max_workers=4)
        assert threaded.dataset == sequential.dataset
        assert threaded.binary == sequential.binary
        assert threaded.report.counts == sequential.report.counts

    def test_strict_raises_lenient_records(self):
        questions = [make_question("ok", abstracts={"d0": "CFTR"}), make_question("bad")]
        strategy = ContextStrategy.full_abstract()
        with pytest.raises(ConversionError):
            convert_questions(questions, strategy)

        result = convert_questions(questions, strategy, strict=False)
        assert [e["id"] for e in result.report.errors] == ["bad"]
        assert len(result.dataset) == 1


class TestFilter:
    def test_offsets_and_boundaries(self, fixtures_dir):
        dataset = parse_squad((fixtures_dir / "squad_sample.json").read_bytes())

        kept, removed = filter_unmatched_squad(dataset)
        assert removed == 1
        assert "a2" not in {i.id for i in kept.instances()}

        kept, removed = filter_unmatched_squad(dataset, boundary_required=True)
        assert removed == 2
        assert [i.id for i in kept.instances()] == ["a1", "a3"]
        # the emptied paragraph is gone, its article stays
        assert kept.articles[1].paragraphs == ()

    def test_filter_is_idempotent(self, fixtures_dir):
        dataset = parse_squad((fixtures_dir / "squad_sample.json").read_bytes())
        once, _ = filter_unmatched_squad(dataset, boundary_required=True)
        twice, removed = filter_unmatched_squad(once, boundary_required=True)
        assert removed == 0
        assert twice == once
