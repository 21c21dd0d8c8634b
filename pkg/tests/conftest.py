"""Shared fixtures for the bioqakit test suite."""

import shutil
from pathlib import Path

import pytest

from bioqakit.config import PipelineConfig, RunContext
from bioqakit.models import BioasqQuestion, GoldAnswer, QuestionType, Snippet

FIXTURES = Path(__file__).parent / "fixtures"


def make_question(
    qid: str = "q1",
    qtype: QuestionType = QuestionType.FACTOID,
    items: tuple[tuple[str, ...], ...] = (("CFTR",),),
    snippets: tuple[str, ...] = ("Mutations in the CFTR gene cause cystic fibrosis.",),
    yes_label: bool | None = None,
    abstracts: dict[str, str] | None = None,
    offsets: tuple[tuple[int, int] | None, ...] | None = None,
    body: str = "Which gene is involved?",
) -> BioasqQuestion:
    """Question with one snippet per text, all cited from document ``d<i>``."""
    offsets = offsets or (None,) * len(snippets)
    return BioasqQuestion(
        id=qid,
        body=body,
        qtype=qtype,
        gold=GoldAnswer(yes_label=yes_label, items=() if qtype == QuestionType.YESNO else items),
        snippets=tuple(
            Snippet(text, f"d{i}", offset) for i, (text, offset) in enumerate(zip(snippets, offsets))
        ),
        abstracts=abstracts or {},
    )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def workdir(tmp_path: Path) -> Path:
    """A scratch copy of the fixture files."""
    target = tmp_path / "work"
    shutil.copytree(FIXTURES, target)
    return target


@pytest.fixture
def ctx(workdir: Path) -> RunContext:
    return RunContext(root=workdir, config=PipelineConfig())
