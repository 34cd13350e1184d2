"""Univariate polynomials and rational functions over a scalar backend.

Dense coefficient vectors, lowest degree first.  The zero polynomial is the
distinguished empty vector and is never produced by silently discarding
small numeric coefficients: tolerance-based trimming happens only in
:func:`chop`, which logs a warning when it removes anything that is not an
exact zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PoleCollision, ZeroDenominator
from .scalars import ExactField, Field, NumericField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial; ``coeffs[k]`` multiplies ``z**k``."""

    field: Field
    coeffs: tuple

    # -- construction -----------------------------------------------------

    @staticmethod
    def make(field: Field, coeffs: Iterable) -> "Poly":
        """Build a polynomial, coercing entries and trimming exact-zero tails."""
        cs = [field(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return Poly(field, tuple(cs))

    @staticmethod
    def zero(field: Field) -> "Poly":
        return Poly(field, ())

    @staticmethod
    def const(field: Field, value) -> "Poly":
        return Poly.make(field, [value])

    @staticmethod
    def ident(field: Field) -> "Poly":
        """The polynomial z."""
        return Poly.make(field, [0, 1])

    # -- shape ------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return len(self.coeffs) - 1

    def lc(self):
        """Leading coefficient."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.field.eq(self.lc(), self.field.one)

    def norm(self):
        """Max coefficient magnitude (0 for the zero polynomial)."""
        if not self.coeffs:
            return self.field.abs(self.field.zero)
        return max(self.field.abs(c) for c in self.coeffs)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Poly.make(self.field, out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.field, tuple(-c for c in self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return Poly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly.make(self.field, out)

    def scale(self, c) -> "Poly":
        c = self.field(c)
        if c == 0:
            return Poly.zero(self.field)
        return Poly(self.field, tuple(a * c for a in self.coeffs))

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Poly.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def deriv(self) -> "Poly":
        return Poly.make(self.field, [k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        lead = self.lc()
        return Poly(self.field, tuple(c / lead for c in self.coeffs))

    def shift_up(self, k: int) -> "Poly":
        """Multiply by z**k."""
        if self.is_zero:
            return self
        return Poly(self.field, (self.field.zero,) * k + self.coeffs)

    def __call__(self, x):
        """Horner evaluation."""
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Polynomial long division (quotient, remainder)."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero or len(self.coeffs) < len(other.coeffs):
            return Poly.zero(self.field), self
        rem = list(self.coeffs)
        dlen = len(other.coeffs)
        lead = other.coeffs[-1]
        quot = [self.field.zero] * (len(rem) - dlen + 1)
        for k in range(len(quot) - 1, -1, -1):
            q = rem[k + dlen - 1] / lead
            quot[k] = q
            if q != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - q * b
        return Poly.make(self.field, quot), Poly.make(self.field, rem[: dlen - 1])

    def deflate(self, root) -> "Poly":
        """Synthetic division by (z - root); any remainder is discarded."""
        if self.is_zero:
            return self
        root = self.field(root)
        n = len(self.coeffs) - 1
        out = [self.field.zero] * n
        acc = self.coeffs[n]
        for k in range(n - 1, -1, -1):
            out[k] = acc
            acc = self.coeffs[k] + acc * root
        return Poly.make(self.field, out)

    def __repr__(self) -> str:
        if self.is_zero:
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if isinstance(self.field, ExactField) and c == 0:
                continue
            terms.append(f"({c})*z^{k}" if k else f"({c})")
        return "Poly(" + " + ".join(terms) + ")"


def chop(p: Poly, scale=None) -> Poly:
    """Trim sub-tolerance trailing coefficients (numeric backend only).

    Logs a warning whenever a nonzero coefficient is dropped, so degree
    bookkeeping never changes silently.
    """
    field = p.field
    if isinstance(field, ExactField) or p.is_zero:
        return p
    ref = scale if scale is not None else p.norm()
    cs = list(p.coeffs)
    dropped = False
    while cs and field.is_zero(cs[-1], scale=ref):
        if cs[-1] != 0:
            dropped = True
        cs.pop()
    if dropped:
        logger.warning("chop: trimmed sub-tolerance leading coefficients (scale %s)", ref)
    return Poly(field, tuple(cs))


def poly_from_roots(field: Field, roots: Sequence, lead=1) -> Poly:
    """lead * prod (z - r) over the root multiset."""
    p = Poly.const(field, lead)
    for r in roots:
        p = p * Poly.make(field, [-field(r), 1])
    return p


def wronskian(p: Poly, q: Poly) -> Poly:
    """W(p, q) = p q' - q p'."""
    return p * q.deriv() - q * p.deriv()


def solve_linear_ode(field: Field, xi, p: Poly) -> Poly:
    """The polynomial h with h' + xi*h = p.

    For xi != 0 the solution is unique with deg h = deg p, found by
    back-substitution from the top coefficient.  For xi = 0 it is the
    antiderivative of p with zero constant term.
    """
    xi = field(xi)
    if xi == 0:
        return Poly.make(field, [field.zero] + [c / field(k + 1) for k, c in enumerate(p.coeffs)])
    if p.is_zero:
        return Poly.zero(field)
    m = p.degree()
    h = [field.zero] * (m + 1)
    h[m] = p.coeffs[m] / xi
    for k in range(m - 1, -1, -1):
        h[k] = (p.coeff(k) - field(k + 1) * h[k + 1]) / xi
    return Poly.make(field, h)


# -- gcd / root machinery --------------------------------------------------


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd over the exact backend (Euclid)."""
    if not isinstance(p.field, ExactField):
        raise NotImplementedError("gcd is exact-backend only; use root separations numerically")
    a, b = p, q
    while not b.is_zero:
        a, b = b, a.divmod(b)[1]
    if a.is_zero:
        return a
    return a.monic()


def rational_roots(p: Poly) -> list[Fraction]:
    """All roots of an exact polynomial, assuming it splits over the rationals.

    Raises ValueError when it does not; multiplicities are repeated.
    """
    if not isinstance(p.field, ExactField):
        raise NotImplementedError("rational_roots requires the exact backend")
    if p.is_zero:
        raise ValueError("zero polynomial")
    roots: list[Fraction] = []
    work = p
    while not work.is_zero and work.degree() > 0:
        root = _one_rational_root(work)
        if root is None:
            raise ValueError("polynomial does not split over the rationals")
        roots.append(root)
        work = work.deflate(root)
    return roots


def _one_rational_root(p: Poly):
    # clear denominators to an integer polynomial, then try divisor pairs
    from math import gcd as igcd

    den = 1
    for c in p.coeffs:
        den = den * c.denominator // igcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    if ints[0] == 0:
        return Fraction(0)
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(n: int):
        out = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.append(d)
                out.append(n // d)
            d += 1
        return sorted(set(out))

    for num in divisors(a0):
        for dd in divisors(an):
            for sign in (1, -1):
                cand = Fraction(sign * num, dd)
                if p(cand) == 0:
                    return cand
    return None


def roots(p: Poly) -> list:
    """Roots of ``p`` with multiplicity, using the field's native route.

    Exact backend: rational-root extraction (raises if the polynomial does
    not split over the rationals).  Numeric backend: eigenvalues of the
    companion matrix followed by one Newton polish per root.
    """
    field = p.field
    if p.is_zero:
        raise ValueError("zero polynomial")
    if isinstance(field, ExactField):
        return rational_roots(p)
    q = chop(p)
    if q.is_zero:
        raise ValueError("polynomial is numerically zero")
    if q.degree() == 0:
        return []
    mon = q.monic()
    n = mon.degree()
    if n == 1:
        return [-mon.coeffs[0]]
    ctx = field.ctx
    comp = ctx.zeros(n, n)
    for k in range(n):
        comp[k, n - 1] = -mon.coeffs[k]
        if k + 1 < n:
            comp[k + 1, k] = ctx.mpf(1)
    eigs = ctx.eig(comp, left=False, right=False)
    dp = mon.deriv()
    polished = []
    for w in eigs:
        w = ctx.mpc(w)
        slope = dp(w)
        if abs(slope) > 0:
            w = w - mon(w) / slope
        polished.append(w)
    polished.sort(key=field.sort_key)
    return polished


def distinct_roots_check(p: Poly) -> bool:
    """True when ``p`` has no multiple roots."""
    if p.is_zero:
        raise ValueError("zero polynomial")
    if p.degree() == 0:
        return True
    if isinstance(p.field, ExactField):
        g = gcd(p, p.deriv())
        return g.degree() == 0
    rs = roots(p)
    tau_root = p.field.tau_root
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            if abs(rs[i] - rs[j]) <= tau_root:
                return False
    return True


def coprime_check(p: Poly, q: Poly) -> bool:
    """True when ``p`` and ``q`` share no root."""
    if p.is_zero or q.is_zero:
        raise ValueError("zero polynomial")
    if p.degree() == 0 or q.degree() == 0:
        return True
    if isinstance(p.field, ExactField):
        return gcd(p, q).degree() == 0
    tau_root = p.field.tau_root
    rq = roots(q)
    for r in roots(p):
        for s in rq:
            if abs(r - s) <= tau_root:
                return False
    return True


# -- rational functions ----------------------------------------------------


@dataclass(frozen=True)
class RationalFn:
    """Quotient of two polynomials; reduced (monic denominator) when exact."""

    num: Poly
    den: Poly

    @staticmethod
    def make(num: Poly, den: Poly) -> "RationalFn":
        if den.is_zero:
            raise ZeroDenominator("rational function with zero denominator")
        field = num.field
        if isinstance(field, ExactField) and not num.is_zero:
            g = gcd(num, den)
            if g.degree() > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
            lead = den.lc()
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        elif isinstance(field, ExactField) and num.is_zero:
            den = Poly.const(field, 1)
        return RationalFn(num, den)

    @staticmethod
    def from_poly(p: Poly) -> "RationalFn":
        return RationalFn(p, Poly.const(p.field, 1))

    @property
    def field(self) -> Field:
        return self.num.field

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn.make(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn.make(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFn") -> "RationalFn":
        if other.num.is_zero:
            raise ZeroDenominator("division by the zero rational function")
        return RationalFn.make(self.num * other.den, self.den * other.num)

    def deriv(self) -> "RationalFn":
        return RationalFn.make(
            self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den
        )

    def __call__(self, x):
        dv = self.den(x)
        if self.field.is_zero(dv, scale=self.den.norm()):
            raise PoleCollision(f"evaluation at a pole ({x})")
        return self.num(x) / dv

    def defect(self, other: "RationalFn"):
        """Max coefficient magnitude of num_l*den_r - num_r*den_l (0 iff equal)."""
        diff = self.num * other.den - other.num * self.den
        return diff.norm()

    def __repr__(self) -> str:
        return f"RationalFn({self.num!r} / {self.den!r})"


def log_deriv(p: Poly) -> RationalFn:
    """p'/p."""
    if p.is_zero:
        raise ZeroDenominator("log derivative of the zero polynomial")
    return RationalFn.make(p.deriv(), p)


# -- dense linear solves ---------------------------------------------------


def solve_linear_system(field: Field, rows: list[list], rhs: list):
    """Gaussian elimination with partial pivoting over the scalar field.

    Returns ``(solution, defect)`` where ``solution`` sets free variables to
    zero and ``defect`` is the max residual magnitude of the eliminated
    zero-rows (exactly 0 for a consistent exact system).  ``solution`` is
    None when the system is structurally inconsistent on the exact backend.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [[field(v) for v in row] + [field(rhs[i])] for i, row in enumerate(rows)]
    exact = isinstance(field, ExactField)
    if exact:
        pivot_tol = field.zero
    else:
        a_norm = max((field.abs(v) for row in a for v in row[:n]), default=field.abs(field.zero))
        pivot_tol = field.tau * max(field.ctx.mpf(1), a_norm)
    piv_cols = []
    r = 0
    for c in range(n):
        piv, best = None, None
        for i in range(r, m):
            mag = field.abs(a[i][c])
            if a[i][c] != 0 and (best is None or mag > best):
                piv, best = i, mag
        if piv is None or (not exact and best <= pivot_tol):
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        for i in range(m):
            if i == r or a[i][c] == 0:
                continue
            factor = a[i][c] / inv
            for j in range(c, n + 1):
                a[i][j] = a[i][j] - factor * a[r][j]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    # residual of the rows with no pivot
    defect = field.abs(field.zero)
    for i in range(r, m):
        defect = max(defect, field.abs(a[i][n]))
    if exact and defect != 0:
        return None, defect
    sol = [field.zero] * n
    for i, c in enumerate(piv_cols):
        acc = a[i][n]
        for j in range(c + 1, n):
            if a[i][j] != 0 and sol[j] != 0:
                acc = acc - a[i][j] * sol[j]
        sol[c] = acc / a[i][c]
    return sol, defect
