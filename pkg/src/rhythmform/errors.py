"""Exception hierarchy shared by all rhythmform modules."""


class RhythmFormError(Exception):
    """Base class for every error raised by rhythmform."""


class ParseError(RhythmFormError):
    """Input bytes or text could not be decoded into a Score."""

    def __init__(self, message, offset=None, field=None):
        self.offset = offset
        self.field = field
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class UnsupportedFormatError(ParseError):
    """Valid input that uses a feature we do not handle (e.g. SMPTE timing)."""


class ValidationError(RhythmFormError):
    """Structurally valid input whose values break an invariant."""


class InsufficientDataError(RhythmFormError):
    """Not enough events to compute the requested quantity."""


class EmptyPieceError(InsufficientDataError):
    """The score (or selection of it) contains no usable events."""


class ComparabilityError(RhythmFormError):
    """Reports computed with different configurations were compared."""
