"""Answer normalization and candidate deduplication."""

from bioqakit.normalize import (
    answers_equal,
    collapse_whitespace,
    dedup_answers,
    dedup_candidates,
    normalize_answer,
)


class TestNormalizeAnswer:
    def test_case_whitespace_and_edge_punctuation(self):
        assert normalize_answer("  The  CFTR\tgene. ") == "the cftr gene"
        assert normalize_answer("(IL-6)") == "il-6"

    def test_inner_punctuation_kept(self):
        assert not answers_equal("TGM-1", "TGM 1")

    def test_unicode_whitespace(self):
        assert collapse_whitespace("a  b") == "a b"

    def test_strict_compares_raw(self):
        assert normalize_answer(" CFTR.", strict=True) == " CFTR."
        assert not answers_equal("CFTR", "cftr", strict=True)


class TestDedup:
    def test_keeps_first_surface_form_in_order(self):
        ranked = ["BRCA1", "brca1.", "TP53", " BRCA1 ", "tp53"]
        assert dedup_answers(ranked) == ["BRCA1", "TP53"]

    def test_strict_only_drops_identical(self):
        assert dedup_answers(["a", "A", "a"], strict=True) == ["a", "A"]

    def test_aliases_collapse_abbreviations(self):
        ranked = ["breast cancer 1", "BRCA1", "TP53"]
        assert dedup_answers(ranked) == ranked
        aliases = {"BRCA1": "breast cancer 1"}
        assert dedup_answers(ranked, aliases) == ["breast cancer 1", "TP53"]

    def test_idempotent(self):
        once = dedup_answers(["x", "X", "y", "y."])
        assert dedup_answers(once) == once

    def test_groups_overlapping_an_earlier_group_dropped(self):
        groups = [("BRAF", "B-raf"), ("b-raf.",), ("KRAS",), ("kras", "K-ras")]
        assert dedup_candidates(groups) == [("BRAF", "B-raf"), ("KRAS",)]

    def test_group_aliases(self):
        groups = [("breast cancer 1",), ("BRCA1", "BRCA-1")]
        assert dedup_candidates(groups, {"BRCA-1": "Breast Cancer 1"}) == [("breast cancer 1",)]
