"""Exception hierarchy shared by every module."""

from __future__ import annotations


class StoryvarError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(StoryvarError, ValueError):
    """An argument violates an operation's precondition."""


class ParseError(StoryvarError, ValueError):
    """Input text could not be parsed.

    ``lineno`` is 1-based when the failure can be pinned to a line.
    """

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class PipelineError(StoryvarError):
    """Base class for failures of the prompt pipeline."""


class RenderError(PipelineError):
    def __init__(self, message: str, placeholder: str | None = None):
        self.placeholder = placeholder
        super().__init__(message)


class ConfigurationError(PipelineError):
    pass


class TransportError(PipelineError):
    def __init__(self, message: str, retriable: bool = True):
        self.retriable = retriable
        super().__init__(message)


class ReplayDivergenceError(PipelineError):
    """The locally rendered prompt differs from the recorded one."""


class SessionError(PipelineError):
    """A session aborted; ``transcript`` holds whatever was recorded so far."""

    def __init__(self, message: str, transcript=None):
        self.transcript = transcript
        super().__init__(message)
