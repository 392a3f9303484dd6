"""Exception hierarchy shared across the pipeline.

Every error raised on a user-facing path derives from DialectIdError so the
CLI can map it to an exit code: validation/parse/alignment problems exit 1,
I/O problems exit 2, anything else exits 3.
"""

from __future__ import annotations


class DialectIdError(Exception):
    """Base class for all pipeline errors."""


class ValidationError(DialectIdError):
    """Input violates a documented invariant (bad config, duplicate id, ...)."""


class ParseError(ValidationError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EncodingError(ValidationError):
    """A file's bytes are not valid UTF-8."""


class AlignmentError(ValidationError):
    """Prediction ids do not match the expected example ids."""


class StageError(DialectIdError):
    """Wraps a failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
