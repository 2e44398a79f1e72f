"""Exception types shared across the package.

All library errors derive from :class:`OSM2DError` so callers can catch one
base class.  Parse-level errors carry the offending line number.
"""


class OSM2DError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(OSM2DError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(InvalidInputError):
    """A function was evaluated outside its mathematical domain."""


class InvalidSceneError(OSM2DError, ValueError):
    """A scene violates a geometric constraint (overlap, antenna inside disk)."""


class ParseError(OSM2DError):
    """A data row contains a token that does not parse as a number."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class StructureError(OSM2DError):
    """A data row has the wrong number of fields."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class CoverageError(OSM2DError):
    """Assembled records do not cover every (emitter, receiver) pair."""

    def __init__(self, missing_pairs):
        self.missing_pairs = list(missing_pairs)
        shown = ", ".join(f"({m}, {n})" for m, n in self.missing_pairs[:8])
        more = "" if len(self.missing_pairs) <= 8 else \
            f" and {len(self.missing_pairs) - 8} more"
        super().__init__(f"missing (emitter, receiver) pairs: {shown}{more}")


class AmbiguityError(OSM2DError):
    """More than one record matched the same (emitter, receiver) pair."""


class DegenerateMapError(OSM2DError):
    """An operation received an all-zero map or an empty set union."""


class BoundNotApplicableError(OSM2DError):
    """A sidelobe bound was requested outside its validity region."""


class PeakCountError(OSM2DError):
    """Peak count does not match the scatterer count."""


class ConfigError(OSM2DError):
    """A run configuration field is missing or invalid."""
