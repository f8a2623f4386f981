"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class PinEntryError(Exception):
    """Base class for every error raised by this package."""


class InvalidConfigError(PinEntryError, ValueError):
    """A configuration value violates its contract (e.g. fewer than 2 buttons)."""


class InvalidColoringError(PinEntryError, ValueError):
    """A digit coloring is unusable (monochrome rounds convey no information)."""


class OutOfRangeError(PinEntryError, IndexError):
    """A button index is outside the session's button count."""


class InconsistentHypothesisError(PinEntryError, ValueError):
    """A mapping was requested for a hypothesis that has been eliminated."""


class InvalidStateError(PinEntryError, RuntimeError):
    """An operation was applied to a state that does not admit it."""


class NothingToSplitError(PinEntryError, ValueError):
    """A bisecting coloring was requested for fewer than two candidates."""


class TranscriptParseError(PinEntryError, ValueError):
    """A transcript document violates the schema.

    Carries ``field`` naming the offending location (dot/bracket path).
    """

    def __init__(self, message: str, field: str = "") -> None:
        self.field = field
        super().__init__(f"{message} (at {field})" if field else message)
