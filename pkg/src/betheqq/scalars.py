"""Scalar backends: exact rationals and arbitrary-precision complex numbers.

Every value in this package travels with a field object that knows how to
build, compare, and serialize its scalars:

  * ``ExactField``  -- ``fractions.Fraction`` with unbounded integers.
    Equality is exact, tolerances are zero.
  * ``NumericField`` -- mpmath ``mpf``/``mpc`` at a configurable binary
    precision, with a *relative* comparison tolerance ``tau`` and a root
    separation tolerance ``tau_root``.

Each ``NumericField`` owns a private mpmath context, so precision is a
property of the values, not of a process-wide switch; two fields with
different precision can be used concurrently.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Union

from mpmath.ctx_mp import MPContext

from .errors import ParseError

Scalar = Union[Fraction, Any]  # Fraction, or mpf/mpc bound to a NumericField

#: default binary precision of the numeric backend
DEFAULT_PRECISION = 256


def _parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {text!r}: {exc}") from None


class ExactField:
    """Rational arithmetic backend (``fractions.Fraction``)."""

    backend = "exact"

    def __init__(self) -> None:
        self.tau = Fraction(0)
        self.tau_root = Fraction(0)
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, value) -> Fraction:
        """Coerce ``value`` (int, Fraction, decimal/rational string) to a scalar."""
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return _parse_rational(value)
        if isinstance(value, (list, tuple)):
            re, im = value
            if self(im) != 0:
                raise ParseError("exact backend has no complex scalars; use the numeric backend")
            return self(re)
        raise ParseError(f"cannot coerce {type(value).__name__} to an exact scalar")

    def is_zero(self, x, scale=None) -> bool:
        return x == 0

    def eq(self, x, y) -> bool:
        return x == y

    def abs(self, x) -> Fraction:
        return abs(x)

    def sort_key(self, x):
        return (x, Fraction(0))

    def to_literal(self, x) -> str:
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)

    def __repr__(self) -> str:
        return "ExactField()"


class NumericField:
    """Complex arithmetic at ``precision`` bits on a private mpmath context.

    ``tau`` is the relative comparison tolerance, ``tau_root`` the minimum
    distance below which two roots count as colliding.  Defaults keep the
    ratios tau = 2^(-5P/8) and tau_root = 2^(-5P/16) of the reference
    precision P = 256.
    """

    backend = "numeric"

    def __init__(self, precision: int = DEFAULT_PRECISION, tau=None, tau_root=None):
        if precision < 24:
            raise ValueError("precision must be at least 24 bits")
        ctx = MPContext()
        ctx.prec = precision
        self.ctx = ctx
        self.precision = precision
        self.tau = ctx.mpf(tau) if tau is not None else ctx.mpf(2) ** -((5 * precision) // 8)
        self.tau_root = (
            ctx.mpf(tau_root) if tau_root is not None else ctx.mpf(2) ** -((5 * precision) // 16)
        )
        self.zero = ctx.mpc(0)
        self.one = ctx.mpc(1)

    def __call__(self, value):
        ctx = self.ctx
        if isinstance(value, (ctx.mpf, ctx.mpc)):
            return value
        if isinstance(value, Fraction):
            return ctx.mpf(value.numerator) / ctx.mpf(value.denominator)
        if isinstance(value, int):
            return ctx.mpf(value)
        if isinstance(value, float):
            return ctx.mpf(value)
        if isinstance(value, complex):
            return ctx.mpc(value.real, value.imag)
        if isinstance(value, str):
            frac = _parse_rational(value) if "/" in value else None
            if frac is not None:
                return self(frac)
            try:
                return ctx.mpf(value.strip())
            except ValueError:
                raise ParseError(f"bad numeric literal {value!r}") from None
        if isinstance(value, (list, tuple)):
            re, im = value
            return self(re) + self(im) * ctx.mpc(0, 1)
        # mpf/mpc from a foreign context
        if hasattr(value, "real") and hasattr(value, "imag"):
            return ctx.mpc(value.real, value.imag)
        raise ParseError(f"cannot coerce {type(value).__name__} to a numeric scalar")

    def is_zero(self, x, scale=None) -> bool:
        bound = self.tau if scale is None else self.tau * max(self.ctx.mpf(1), abs(scale))
        return abs(x) <= bound

    def eq(self, x, y) -> bool:
        return abs(x - y) <= self.tau * max(self.ctx.mpf(1), abs(x), abs(y))

    def abs(self, x):
        return abs(x)

    def sort_key(self, x):
        z = self.ctx.mpc(x)
        return (z.real, z.imag)

    def to_literal(self, x):
        """Decimal string(s) carrying the full stored precision."""
        digits = self.ctx.dps + 6
        z = self.ctx.mpc(x)
        if z.imag == 0:
            return self.ctx.nstr(z.real, digits)
        return [self.ctx.nstr(z.real, digits), self.ctx.nstr(z.imag, digits)]

    def __repr__(self) -> str:
        return f"NumericField(precision={self.precision})"


Field = Union[ExactField, NumericField]


def make_field(backend: str = "exact", precision: int = DEFAULT_PRECISION,
               tau=None, tau_root=None) -> Field:
    """Build a field from file-format keys (``backend``/``precision_bits``)."""
    if backend == "exact":
        return ExactField()
    if backend == "numeric":
        return NumericField(precision=precision, tau=tau, tau_root=tau_root)
    raise ParseError(f"unknown backend {backend!r}")
