"""Answerability classification and the unanswerable-rate audit."""

from decimal import ROUND_DOWN
from fractions import Fraction

import pytest

from bioqakit.answerability import (
    MatchCategory,
    audit,
    classify_match,
    format_rate,
    question_answerable,
)
from bioqakit.converter import enumerate_qca_triplets
from bioqakit.formats import parse_bioasq
from bioqakit.models import ContextStrategy, QuestionType, Snippet

from conftest import make_question


def _snippets(*texts: str) -> tuple[Snippet, ...]:
    return tuple(Snippet(text, "d") for text in texts)


class TestClassifyMatch:
    @pytest.mark.parametrize(
        ("item", "text", "expected"),
        [
            (("CFTR",), "The CFTR gene", MatchCategory.EXACT),
            (("cftr", "CFTR"), "The CFTR gene", MatchCategory.EXACT),
            (("Vemurafenib",), "vemurafenib works", MatchCategory.LOWERCASE),
            (("12 hours",), "after 12  hours", MatchCategory.WHITESPACE),
            (("12 Hours",), "after 12\nhours", MatchCategory.WHITESPACE),
            (("acute myeloid leukemia",), "myeloid leukemia cases", MatchCategory.ADDITIONAL_PHRASE),
            (("heat shock protein 70",), "no relevant text", MatchCategory.NO_MATCH),
            (("CFTR",), "The CFTR1 locus", MatchCategory.NO_MATCH),
        ],
    )
    def test_categories(self, item, text, expected):
        assert classify_match(item, _snippets(text)) == expected

    def test_short_phrase_must_cover_half(self):
        # "cancer" alone is a quarter of the answer, so it does not count
        assert classify_match(("small cell lung cancer",), _snippets("cancer")) == MatchCategory.NO_MATCH

    def test_any_snippet_counts(self):
        assert classify_match(("CFTR",), _snippets("nothing", "CFTR")) == MatchCategory.EXACT

    def test_phrases_are_contiguous_runs(self):
        assert classify_match(("heat shock protein",), _snippets("heat protein")) == MatchCategory.NO_MATCH
        assert classify_match(("heat shock protein",), _snippets("shock protein")) == MatchCategory.ADDITIONAL_PHRASE

    def test_tgm1_rephrased_answer(self):
        gold = "transglutaminase-1 gene (TGM1) mutations"
        snippet = "mutation of the transglutaminase 1 gene (TGM1)"
        assert classify_match((gold,), _snippets(snippet)) == MatchCategory.ADDITIONAL_PHRASE

        question = make_question(items=((gold,),), snippets=(snippet,))
        assert enumerate_qca_triplets(question, ContextStrategy.snippet_as_is()) == []
        assert not question_answerable(question).answerable


class TestQuestionAnswerable:
    def test_list_needs_every_item(self):
        question = make_question(
            qtype=QuestionType.LIST,
            items=(("BRAF",), ("kras",)),
            snippets=("BRAF and KRAS",),
        )
        result = question_answerable(question)
        assert not result.answerable
        assert result.categories == (MatchCategory.EXACT, MatchCategory.LOWERCASE)
        assert result.category == MatchCategory.LOWERCASE

    def test_factoid(self):
        assert question_answerable(make_question()).answerable

    def test_yesno_rejected(self):
        with pytest.raises(ValueError):
            question_answerable(make_question(qtype=QuestionType.YESNO, yes_label=True))


class TestAudit:
    def test_sample_corpus(self, fixtures_dir):
        corpus = parse_bioasq((fixtures_dir / "bioasq_sample.json").read_bytes())
        report = audit(corpus.questions)

        assert report.rate("unlabeled", QuestionType.FACTOID) == Fraction(1, 2)
        assert report.rate("total", QuestionType.LIST) == Fraction(1, 1)
        categories = {r.question_id: r.category for _, r in report.results}
        assert categories == {
            "q_factoid1": MatchCategory.EXACT,
            "q_list1": MatchCategory.LOWERCASE,
            "q_factoid2": MatchCategory.WHITESPACE,
        }

    def _batch(self, label: str, unanswerable: int, total: int, qtype: QuestionType):
        """``total`` questions of which the first ``unanswerable`` have no exact match."""
        questions, labels = [], {}
        for n in range(total):
            qid = f"{label}-{qtype}-{n}"
            text = "nothing relevant" if n < unanswerable else "CFTR is here"
            questions.append(make_question(qid, qtype, items=(("CFTR",),), snippets=(text,)))
            labels[qid] = label
        return questions, labels

    def test_batch_fractions_and_rounding(self):
        factoid = [(14, 39), (3, 25), (9, 29), (4, 34), (8, 35)]
        listed = [(1, 12), (4, 17), (5, 25), (3, 22), (6, 12)]
        questions, labels = [], {}
        for n, ((fu, ft), (lu, lt)) in enumerate(zip(factoid, listed), start=1):
            for unanswerable, total, qtype in ((fu, ft, QuestionType.FACTOID), (lu, lt, QuestionType.LIST)):
                batch_questions, batch_labels = self._batch(f"batch{n}", unanswerable, total, qtype)
                questions += batch_questions
                labels |= batch_labels

        report = audit(questions, labels)
        assert report.rate("batch1", QuestionType.FACTOID) == Fraction(14, 39)
        assert format_rate(report.rate("batch1", QuestionType.FACTOID)) == 0.359
        # totals are summed from the batch rows
        total_factoid = report.row("total", QuestionType.FACTOID)
        assert (total_factoid.unanswerable, total_factoid.total) == (38, 162)
        assert format_rate(total_factoid.rate) == 0.235

        total_list = report.row("total", QuestionType.LIST)
        assert (total_list.unanswerable, total_list.total) == (19, 88)
        rows = {(r["batch"], r["type"]): r for r in report.to_dict()["rows"]}
        assert rows[("total", "list")]["fraction"] == "19/88"
        assert rows[("batch5", "list")]["rate"] == 0.5

    def test_half_even_and_truncation_differ(self):
        rate = Fraction(18, 88)
        assert format_rate(rate) == 0.205
        assert format_rate(rate, ROUND_DOWN) == 0.204

    def test_yesno_ignored(self):
        report = audit([make_question(qtype=QuestionType.YESNO, yes_label=True)])
        assert report.rows == {}
