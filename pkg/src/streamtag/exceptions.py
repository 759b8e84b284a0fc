class StreamtagError(Exception):
    """Base class for all errors raised by streamtag."""


class ConfigError(StreamtagError, ValueError):
    """A configuration value violates its precondition."""


class ParseError(StreamtagError, ValueError):
    """A corpus line could not be turned into a Post."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class UnlabeledPostError(StreamtagError, ValueError):
    """Raised when a post without hashtags is pushed into a window."""


class EmptyWindowError(StreamtagError):
    """Statistics were requested from a window holding no posts."""


class SnapshotExpiredError(StreamtagError):
    """A snapshot lagged the writer further than the journal retains."""
