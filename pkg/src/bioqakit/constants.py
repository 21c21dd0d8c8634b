"""Constants for bioqakit output, display and data formats."""

import os

# Check if NO_EMOJI environment variable is set
NO_EMOJI = os.getenv("NO_EMOJI", "").lower() in ("1", "true", "yes")

# Core status symbols
CHECK_MARK = "SUCCESS:" if NO_EMOJI else "✓"
CROSS_MARK = "ERROR:" if NO_EMOJI else "✗"
WARNING_SIGN = "WARNING:" if NO_EMOJI else "⚠"
INFO_MARK = "INFO:" if NO_EMOJI else "ℹ"

# Navigation and structure symbols
ARROW = "->" if NO_EMOJI else "→"

# Data formats
SQUAD_VERSION = "v1.1"
MAX_FACTOID_CANDIDATES = 5  # BioASQ submission limit
LENGTH_BUCKET_WIDTH = 16  # whitespace tokens per histogram bucket

# Sentence segmentation: lowercase words (with their final period) that never end a sentence
ABBREVIATIONS = frozenset(
    {
        "al.",
        "approx.",
        "ca.",
        "cf.",
        "dr.",
        "e.g.",
        "eq.",
        "fig.",
        "figs.",
        "i.e.",
        "mr.",
        "mrs.",
        "ms.",
        "pp.",
        "prof.",
        "ref.",
        "refs.",
        "resp.",
        "sp.",
        "spp.",
        "st.",
        "vol.",
        "vs.",
    }
)

# Abbreviations only when a number follows ("No. 5"); otherwise "no." ends a sentence
NUMBER_ABBREVIATIONS = frozenset({"no.", "nos."})
