"""Semantic exception hierarchy for the signaling-market library.

Public solvers never raise bare ValueError: callers (and the CLI exit-code
mapping) need to distinguish malformed inputs from numerical failures and
from resource-cap refusals.
"""


class SigMarketError(Exception):
    """Base error for this package."""


class InputError(SigMarketError, ValueError):
    """Inputs violate a documented contract (domain, shape, range, schema)."""


class RangeError(InputError):
    """A value falls outside the representable range of a tabulated family."""


class NumericError(SigMarketError, ArithmeticError):
    """A numerical routine failed to converge or hit a degenerate system."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class ResourceError(SigMarketError):
    """A request exceeds an explicit size cap (refused, never truncated)."""


class InvariantViolation(SigMarketError):
    """An internal consistency guarantee failed; indicates a caller bug."""
