"""Arbitrary-precision arithmetic context and exact-rational polynomials in k.

Every numerical routine in this package takes an explicit PrecisionContext.
The context owns a private mpmath context object, so computations at
different precisions can run side by side without touching mpmath's global
state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from mpmath.ctx_mp import MPContext

from .errors import InconsistentInterpolation

# Cache of mpmath contexts keyed by effective decimal digits.  MPContext
# construction is not free and contexts are stateless apart from precision.
_MP_CACHE: dict[int, MPContext] = {}


def _mp_for(digits: int) -> MPContext:
    ctx = _MP_CACHE.get(digits)
    if ctx is None:
        ctx = MPContext()
        ctx.dps = digits
        _MP_CACHE[digits] = ctx
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in decimal digits plus guard digits.

    The effective precision (decimal_digits + guard_digits) is fixed for the
    lifetime of any computation using this context.
    """

    decimal_digits: int
    guard_digits: int = 10

    def __post_init__(self):
        if self.decimal_digits < 15:
            raise ValueError("decimal_digits must be >= 15")
        if self.guard_digits < 0:
            raise ValueError("guard_digits must be >= 0")

    @property
    def effective_digits(self) -> int:
        return self.decimal_digits + self.guard_digits

    @property
    def mp(self) -> MPContext:
        """The mpmath context carrying out arithmetic at effective precision."""
        return _mp_for(self.effective_digits)

    @property
    def eps(self):
        """10^(-effective_digits), the relative truncation threshold."""
        return self.mp.mpf(10) ** (-self.effective_digits)

    # -- constructors ------------------------------------------------------

    def real(self, x):
        return self.mp.mpf(x)

    def complex(self, re, im=0):
        return self.mp.mpc(re, im)

    def convert(self, x):
        """Coerce x (int, str, Fraction, mpf, mpc, complex) to this context."""
        mp = self.mp
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        im = getattr(x, "imag", None)
        if isinstance(x, complex) or (im is not None and im != 0):
            return mp.mpc(x)
        if im is not None and not isinstance(x, (int, float)):
            # real-valued mpf/mpc: route through the real part
            try:
                return mp.mpf(x)
            except TypeError:
                return mp.mpf(x.real)
        return mp.mpf(x)

    def to_str(self, x, digits: int | None = None) -> str:
        """Decimal string at declared (not effective) precision by default."""
        n = digits if digits is not None else self.decimal_digits
        return self.mp.nstr(x, n)


def is_real(value, tol=0) -> bool:
    """True when value has no imaginary part beyond tol."""
    im = getattr(value, "imag", 0)
    return abs(im) <= tol


@dataclass(frozen=True)
class KPolynomial:
    """Polynomial in k with exact rational coefficients, lowest degree first.

    Canonical form: no trailing zero coefficients.
    """

    coefficients: tuple[Fraction, ...] = field(default=())

    @staticmethod
    def from_list(coeffs: Sequence) -> "KPolynomial":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return KPolynomial(tuple(cs))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def __call__(self, k: Fraction) -> Fraction:
        """Exact evaluation at a rational point (Horner)."""
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * k + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, KPolynomial) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return "KPolynomial(%s)" % (list(self.coefficients),)


def evaluate_kpoly(p: KPolynomial, k, ctx: PrecisionContext):
    """Horner evaluation of p at a real or complex k at context precision."""
    mp = ctx.mp
    kv = ctx.convert(k)
    acc = mp.mpf(0)
    for c in reversed(p.coefficients):
        acc = acc * kv + mp.mpf(c.numerator) / c.denominator
    return acc


def interpolate_kpoly(points: Sequence[tuple[int, Fraction]], degree_bound: int) -> KPolynomial:
    """Unique polynomial of degree <= degree_bound through the first
    degree_bound+1 points, exact over the rationals.

    Any remaining points are consistency-checked exactly; a mismatch raises
    InconsistentInterpolation (it signals a bug upstream, not bad data).
    """
    if degree_bound < 0:
        raise ValueError("degree_bound must be >= 0")
    if len(points) < degree_bound + 1:
        raise ValueError("need at least degree_bound+1 points")
    base = points[: degree_bound + 1]
    xs = [p[0] for p in base]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation points must have distinct k")

    # Newton divided differences over Fraction.
    ys = [Fraction(p[1]) for p in base]
    n = len(base)
    table = list(ys)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - level])
    # Expand Newton form to monomial coefficients.
    coeffs = [Fraction(0)] * n
    acc = [Fraction(0)] * n  # running product prod (k - x_j)
    acc[0] = Fraction(1)
    deg = 0
    for j in range(n):
        for i in range(deg + 1):
            coeffs[i] += table[j] * acc[i]
        if j < n - 1:
            new = [Fraction(0)] * n
            for i in range(deg + 1):
                new[i + 1] += acc[i]
                new[i] += -Fraction(xs[j]) * acc[i]
            acc = new
            deg += 1
    poly = KPolynomial.from_list(coeffs)
    for kx, val in points[degree_bound + 1:]:
        if poly(Fraction(kx)) != Fraction(val):
            raise InconsistentInterpolation(
                f"extra point k={kx} disagrees with interpolated polynomial"
            )
    return poly
