"""bioqakit: BioASQ-to-SQuAD conversion, answerability audits and Phase-B scoring."""

__version__ = "0.3.0"
