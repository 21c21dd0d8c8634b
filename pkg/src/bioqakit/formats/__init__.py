"""Readers and writers for BioASQ, SQuAD, prediction and pair files."""

from .bioasq import parse_bioasq
from .pairs import parse_pairs, write_pairs
from .predictions import PredictionFile, parse_predictions, write_predictions
from .squad import (
    parse_binary,
    parse_squad,
    squad_statistics,
    write_binary,
    write_squad,
)

__all__ = [
    "PredictionFile",
    "parse_bioasq",
    "parse_binary",
    "parse_pairs",
    "parse_predictions",
    "parse_squad",
    "squad_statistics",
    "write_binary",
    "write_pairs",
    "write_predictions",
    "write_squad",
]
