"""Exception types shared across the package."""

from __future__ import annotations


class BetheqqError(Exception):
    """Base class for all errors raised by this package."""


class InvalidCartanType(BetheqqError):
    """Family/rank combination outside the legal range."""


class UnsupportedType(BetheqqError):
    """Operation not defined for this Lie type (e.g. folding C_n or F_4)."""


class ZeroDenominator(BetheqqError):
    """A rational function was built with a zero denominator."""


class InconsistentSystem(BetheqqError):
    """No polynomial q^-_i completes the given q^+ family for color i.

    Equivalent to failure of the Bethe equations at the roots of color i.
    """

    def __init__(self, color: int, message: str = ""):
        self.color = color
        super().__init__(message or f"no polynomial completion for color {color}")


class PoleCollision(BetheqqError):
    """A residual denominator vanishes (coincident roots or root on a singularity)."""


class NoConvergence(BetheqqError):
    """Iteration budget exhausted before the residual tolerance was met."""


class SingularJacobian(BetheqqError):
    """Newton Jacobian stayed singular through the retry policy."""


class BadPartition(BetheqqError):
    """Root-assignment data violates the infinite-system constraints."""


class PathCollision(BetheqqError):
    """Two tracked roots merged during continuation."""


class ChainBroken(BetheqqError):
    """A Backlund chain step failed; carries the partial trace."""

    def __init__(self, step: int, cause: Exception, trace=None):
        self.step = step
        self.cause = cause
        self.trace = trace
        super().__init__(f"chain broke at step {step}: {cause}")


class FactorizationFailed(BetheqqError):
    """Matrix not in the open Bruhat cell B+ w0 N+ (zero pivot met)."""


class ParseError(BetheqqError):
    """Malformed input file or scalar literal."""
