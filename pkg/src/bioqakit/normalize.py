"""Answer-string normalization and ranked-candidate deduplication."""

import re
import unicodedata
from collections.abc import Iterable, Mapping, Sequence

_WHITESPACE = re.compile(r"\s+")


def collapse_whitespace(text: str) -> str:
    """Replace every whitespace run (unicode spaces included) with one space."""
    return _WHITESPACE.sub(" ", text).strip()


def _is_punct(char: str) -> bool:
    return unicodedata.category(char).startswith("P")


def strip_edge_punctuation(text: str) -> str:
    start, end = 0, len(text)
    while start < end and _is_punct(text[start]):
        start += 1
    while end > start and _is_punct(text[end - 1]):
        end -= 1
    return text[start:end]


def normalize_answer(text: str, strict: bool = False) -> str:
    """Comparison key for answer equality.

    Lowercases, collapses whitespace and strips leading/trailing punctuation.
    Inner punctuation is kept: "TGM-1" and "TGM 1" stay distinct.

    Args:
        text: Raw answer string
        strict: Compare raw strings instead (sensitivity analysis)
    """
    if strict:
        return text
    return collapse_whitespace(strip_edge_punctuation(collapse_whitespace(text.lower())))


def answers_equal(a: str, b: str, strict: bool = False) -> bool:
    return normalize_answer(a, strict) == normalize_answer(b, strict)


def dedup_answers(
    candidates: Iterable[str],
    aliases: Mapping[str, str] | None = None,
    strict: bool = False,
) -> list[str]:
    """Drop later candidates that normalize to an earlier one; order is kept.

    Surface normalization only. "BRCA1" and "breast cancer 1" both survive
    unless ``aliases`` (alias -> canonical form, e.g. produced by an external
    abbreviation resolver) maps one onto the other.
    """
    return [group[0] for group in dedup_candidates([(c,) for c in candidates], aliases, strict)]


def dedup_candidates(
    candidates: Iterable[Sequence[str]],
    aliases: Mapping[str, str] | None = None,
    strict: bool = False,
) -> list[tuple[str, ...]]:
    """Like ``dedup_answers`` for synonym groups.

    A group is dropped when any of its synonyms matches a synonym of an earlier
    kept group.
    """
    alias_keys = {normalize_answer(k, strict): v for k, v in (aliases or {}).items()}

    def key(text: str) -> str:
        return normalize_answer(alias_keys.get(normalize_answer(text, strict), text), strict)

    seen: set[str] = set()
    kept: list[tuple[str, ...]] = []
    for group in candidates:
        keys = {key(s) for s in group}
        if keys & seen:
            continue
        seen |= keys
        kept.append(tuple(group))
    return kept
