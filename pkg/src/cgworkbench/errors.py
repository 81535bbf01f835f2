"""Exception hierarchy shared across the workbench."""

from __future__ import annotations

from typing import Optional


class CGError(Exception):
    """Base class for all domain errors raised by this package."""


class LabelError(CGError):
    """A label token is outside the closed enumerations, or used where undefined."""


class EngineError(CGError):
    """A dialogue-state operation violated one of its preconditions.

    Carries a stable machine-readable ``code`` plus the event id involved
    (when there is one), so transports can surface it as a diagnostic.
    """

    def __init__(self, code: str, message: str, event: Optional[str] = None):
        super().__init__(message)
        self.code = code
        self.event = event
        self.message = message


class ParseError(CGError):
    """Input text or document could not be parsed.

    ``line`` is set for line-oriented formats, ``path`` (a JSON pointer)
    for JSON documents. Exactly one of the two is normally present.
    """

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        loc = ""
        if line is not None:
            loc = f" at line {line}"
        elif path:
            loc = f" at {path}"
        super().__init__(f"{message}{loc}")
        self.line = line
        self.path = path


class AgreementError(CGError):
    """An agreement metric was asked for on inputs it is undefined for."""


class EmbeddingServiceError(CGError):
    """The remote embedding service failed or returned a malformed response."""
