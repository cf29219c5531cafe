"""Exception hierarchy for the bfcr package."""


class BfcrError(Exception):
    """Base class for all bfcr errors."""


class EmptyInput(BfcrError):
    """Input contains no data rows."""


class ParseError(BfcrError):
    """A data row failed to parse as a number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonFiniteValue(BfcrError):
    """A value is NaN or infinite where a finite number is required."""


class InvalidParams(BfcrError):
    """Parameter values violate their constraints."""


class ZeroAnchor(BfcrError):
    """A brace shape has a zero anchor and cannot be unit-normalized."""


class ContinuationUnbounded(BfcrError):
    """The continuation solve violated the boundedness contract."""


class TooFewPoints(BfcrError):
    """The series is shorter than the operation requires."""


class NumericalFailure(BfcrError):
    """A pipeline intermediate became non-finite."""


class NonRealSignal(BfcrError):
    """Spectrum is not conjugate-symmetric, so no real signal matches it."""


class ShapeError(BfcrError):
    """Array lengths do not match."""


class NoData(BfcrError):
    """No points remain after exclusions."""
