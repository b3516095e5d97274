"""Exception types shared across the package."""


class LghError(Exception):
    """Base class for all library errors."""


class SpaceValidationError(LghError):
    """A space object violates the metric-space invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SpaceParseError(LghError):
    """A space or manifest file could not be parsed.

    ``line`` and ``column`` locate the problem when it is syntactic,
    ``field`` names the offending entry when it is structural.
    """

    def __init__(self, message, line=None, column=None, field=None):
        self.line = line
        self.column = column
        self.field = field
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif field is not None:
            where = f" (field {field!r})"
        super().__init__(message + where)


class SizeCapError(LghError):
    """An exact search was refused because the instance exceeds its cap."""


class ParameterError(LghError):
    """An argument is outside the operation's admissible range."""


class PreconditionError(LghError):
    """A documented precondition of the operation does not hold."""


class MalformedDataError(LghError):
    """Travel time data is internally inconsistent."""


class QuotientError(LghError):
    """Merging near-zero-distance points produced inconsistent distances."""
