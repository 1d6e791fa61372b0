"""Exception hierarchy shared by every msifm module."""

from __future__ import annotations


class MsIfmError(Exception):
    """Base class for all msifm errors."""


class ValidationError(MsIfmError, ValueError):
    """An instance, selection, or constraint violates its invariants."""


class ParseError(MsIfmError, ValueError):
    """A text document could not be parsed."""


class SchemaMismatch(MsIfmError, ValueError):
    """Objects defined over different schemas were combined."""


class DimensionMismatch(MsIfmError, ValueError):
    pass


class BorderTooLarge(MsIfmError):
    """The negative border of an MV attribute exceeds the configured cap."""

    def __init__(self, cap: int, attr: str | None = None):
        self.cap = cap
        self.attr = attr
        where = f" for attribute {attr!r}" if attr is not None else ""
        super().__init__(f"negative border{where} has more than {cap} members")


class NumericFailure(MsIfmError):
    """The simplex could not continue (singular basis, unbounded ray, no start)."""


class TimeBudgetExceeded(MsIfmError):
    pass


class TooLarge(MsIfmError):
    """Full expansion of the transaction space exceeds the allowed column cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} transaction columns exceed the cap of {cap}")


class CapSaturation(MsIfmError):
    """Rounding could not reach the target size without breaching duplicate caps.

    ``partial`` holds the best integer dataset found, ``shortfall`` the number
    of units that could not be placed.
    """

    def __init__(self, partial, shortfall: int):
        self.partial = partial
        self.shortfall = shortfall
        super().__init__(f"duplicate caps leave {shortfall} units unplaced")
