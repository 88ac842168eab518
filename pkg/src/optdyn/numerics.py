"""Arbitrary-precision numeric contexts.

Everything in this package computes on :class:`decimal.Decimal` values under
an explicitly configured precision, measured in significant decimal digits.
Optimistic learning dynamics on the hard game family drive iterates within
``exp(-50)`` of the simplex boundary and beyond, which is unrepresentable in
binary floats, so the precision is a first-class run parameter.

A :class:`NumericContext` is immutable.  All arithmetic belonging to a run
must execute inside ``with ctx.activate():`` so that a single precision
governs every operation; the high-level entry points (simulation runs, the
assumption verifier, the CLI) do this themselves.  Mixing two contexts in
one computation is therefore impossible without two nested ``activate``
blocks, which never happens in this codebase.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from decimal import Decimal

MIN_DIGITS = 16
GUARD_DIGITS = 10

# Wide exponent range so exp()/ln() never overflow at the probe points used
# by the rationality checks (arguments up to 1e6 in magnitude).
_EMAX = 10**9
_EMIN = -(10**9)


@dataclass(frozen=True)
class Tolerance:
    """Absolute and relative comparison tolerances derived from a context."""

    rel: Decimal
    abs: Decimal


class NumericContext:
    """A fixed-precision decimal context with `digits` significant digits.

    The tolerance used by equality assertions leaves ``GUARD_DIGITS`` guard
    digits: each simulation iteration performs O(10) elementary operations,
    so accumulated rounding stays far below the guard band for any run up to
    ~1e6 iterations.
    """

    __slots__ = ("digits", "_ctx")

    def __init__(self, digits: int):
        if not isinstance(digits, int) or isinstance(digits, bool):
            raise TypeError(f"digits must be an int, got {type(digits).__name__}")
        if digits < MIN_DIGITS:
            raise ValueError(f"precision must be at least {MIN_DIGITS} digits, got {digits}")
        object.__setattr__(self, "digits", digits)
        object.__setattr__(
            self, "_ctx", decimal.Context(prec=digits, Emax=_EMAX, Emin=_EMIN)
        )

    def __setattr__(self, name, value):
        raise AttributeError("NumericContext is immutable")

    def __repr__(self) -> str:
        return f"NumericContext(digits={self.digits})"

    def __eq__(self, other) -> bool:
        return isinstance(other, NumericContext) and other.digits == self.digits

    def __hash__(self) -> int:
        return hash(("NumericContext", self.digits))

    def activate(self):
        """Context manager installing this precision for decimal arithmetic."""
        return decimal.localcontext(self._ctx)

    def real(self, value: int | str | Decimal) -> Decimal:
        """Create a value at this context's precision.

        Floats are rejected: they would smuggle binary rounding error into a
        decimal computation.  Pass the literal as a string instead.
        """
        if isinstance(value, float):
            raise TypeError("pass floats as strings, e.g. real('0.1'), to keep decimal semantics")
        if not isinstance(value, (int, str, Decimal)):
            raise TypeError(f"cannot build a real from {type(value).__name__}")
        return self._ctx.plus(Decimal(value))

    def tolerance(self) -> Tolerance:
        eps = self._ctx.power(Decimal(10), Decimal(-(self.digits - GUARD_DIGITS)))
        return Tolerance(rel=eps, abs=eps)


def make_context(digits: int) -> NumericContext:
    """Create a numeric context with `digits` significant decimal digits (>= 16)."""
    return NumericContext(digits)


def default_tolerance(ctx: NumericContext) -> Tolerance:
    """Tolerance 10**-(digits - 10), absolute and relative alike."""
    return ctx.tolerance()


def is_close(a: Decimal, b: Decimal, tol: Tolerance) -> bool:
    """|a - b| <= tol.abs + tol.rel * max(|a|, |b|)."""
    return abs(a - b) <= tol.abs + tol.rel * max(abs(a), abs(b))


def canonical(x: Decimal) -> str:
    """Canonical decimal string: sign, digits, optional '.', optional e+/-exp.

    Round-trips exactly: ``Decimal(canonical(x)) == x`` at any precision.
    """
    return str(x).replace("E", "e")


def parse_real(s: str) -> Decimal:
    """Parse a canonical decimal string exactly (no rounding on input)."""
    try:
        d = Decimal(s)
    except decimal.InvalidOperation as exc:
        raise ValueError(f"not a decimal literal: {s!r}") from exc
    if not d.is_finite():
        raise ValueError(f"not a finite decimal: {s!r}")
    return d
