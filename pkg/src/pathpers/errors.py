"""Exception hierarchy. Each family carries the CLI exit code it maps to."""

from __future__ import annotations


class PathPersError(Exception):
    exit_code = 1


class ParseError(PathPersError, ValueError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInput(ParseError):
    pass


class MixedDimension(ParseError):
    pass


class UnparsableNumber(ParseError):
    pass


class BadHeader(ParseError):
    pass


class KOutOfRange(ParseError):
    pass


class ValidationError(PathPersError, ValueError):
    exit_code = 3


class MissingFace(ValidationError):
    pass


class NonMonotoneGrade(ValidationError):
    pass


class DuplicateSimplex(ValidationError):
    pass


class BadGrade(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NonPositiveRadius(ValidationError):
    pass


class DimensionOverflow(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class BadQ(ValidationError):
    pass


class NonPositiveScale(ValidationError):
    pass


class PathError(PathPersError, ValueError):
    exit_code = 4


class NonIncreasingSegment(PathError):
    pass


class NegativeCoordinate(PathError):
    pass


class SearchSpaceError(PathPersError, ValueError):
    exit_code = 5


class EmptyInitRegion(SearchSpaceError):
    pass


class EmptySearchSpace(SearchSpaceError):
    pass


class BadSimplex(ValidationError):
    pass
