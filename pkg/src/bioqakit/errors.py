"""Exception hierarchy for bioqakit.

Every error carries the process exit code the CLI uses for it, so scripts can
tell a malformed file from a schema violation without parsing messages.
"""

from typing import Any


class BioqaError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message: str, **fields: Any):
        super().__init__(message)
        self.message = message
        self.fields = fields

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable form written to stderr by the CLI."""
        return {
            "type": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            **self.fields,
        }


class InputError(BioqaError):
    """An input file is missing or unreadable."""

    exit_code = 3


class ParseError(BioqaError):
    """Input is not valid UTF-8 JSON."""

    exit_code = 4

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})", offset=offset)
        self.offset = offset


class SchemaError(BioqaError):
    """Input is JSON but does not follow the expected schema."""

    exit_code = 5

    def __init__(self, message: str, field: str | None = None, index: int | None = None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if index is not None:
            where.append(f"record {index}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}", field=field, index=index)
        self.field = field
        self.index = index


class ConversionError(BioqaError):
    """A question cannot be converted under the requested strategy."""

    exit_code = 6


class EvaluationError(BioqaError):
    """Predictions and golden answers cannot be scored together."""

    exit_code = 6

    def __init__(self, message: str, question_id: str | None = None):
        super().__init__(message, question_id=question_id)
        self.question_id = question_id


class StageError(BioqaError):
    """A training stage failed; the plan is aborted."""

    exit_code = 7

    def __init__(self, stage: str, message: str):
        super().__init__(f"Stage '{stage}' failed: {message}", stage=stage)
        self.stage = stage


class ConfigError(BioqaError):
    """Configuration file or flag values are invalid."""

    exit_code = 8
