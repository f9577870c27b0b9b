"""Error hierarchy for the numeric core.

Every error carries a stable ``code`` which the CLI prints on stderr and the API
returns in its error body.
"""
from typing import Any, Iterable, Optional


class CksError(Exception):
    """Base class for all toolkit errors."""

    code = "CksError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class InvalidTolerance(CksError, ValueError):
    code = "InvalidTolerance"


class BadParam(CksError, ValueError):
    code = "BadParam"


class NonDecreasingTail(CksError):
    """Series terms were still growing when the term budget ran out."""

    code = "NonDecreasingTail"


class NoBracket(CksError):
    """Bracket expansion hit the range cap without enclosing an extremum."""

    code = "NoBracket"

    def __init__(self, message: str = "", side: Optional[str] = None, edge: Optional[float] = None):
        super().__init__(message)
        self.side = side  # "left" | "right"
        self.edge = edge


class NonFinite(CksError):
    code = "NonFinite"


class OverflowDomain(CksError):
    code = "OverflowDomain"


class ParseError(CksError):
    """Malformed growth expression."""

    code = "ParseError"

    def __init__(self, message: str, position: int, expected: Iterable[str] = ()):
        self.position = position
        self.expected = sorted(set(expected))
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class NonPositive(CksError):
    code = "NonPositive"


class EvalFailure(CksError):
    code = "EvalFailure"


class AbortAt(CksError):
    """Legendre table construction failed at ``index``; ``partial`` holds the prefix."""

    code = "AbortAt"

    def __init__(self, index: int, partial: Any = None, cause: Optional[BaseException] = None):
        super().__init__(f"table construction failed at n={index}: {cause}")
        self.index = index
        self.partial = partial
        self.cause = cause


class DivergentProfile(CksError):
    code = "DivergentProfile"


class TooShort(CksError):
    code = "TooShort"


class LengthMismatch(CksError):
    code = "LengthMismatch"
