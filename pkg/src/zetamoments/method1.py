"""Moment polynomial assembly from the coefficient formula: each x^(k^2-r)
coefficient is the leading coefficient times a shape sum of integrand
coefficients against the combinatorial determinant factors.

Positive integer k uses exact rational determinant factors evaluated at k
directly; other k evaluates the interpolated polynomials, continuing the
leading factorial product through the Barnes G-function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .determinants import NkTable, raw_det_factor
from .errors import DomainError, MissingShape
from .localfactors import ArithmeticCoefficients, integrand_coefficients
from .precision import PrecisionContext, evaluate_kpoly
from .shapes import Shape, delta, shapes_of_weight
from .special import _cached_primes  # noqa: F401  (re-exported convenience)


@dataclass
class MomentPolynomial:
    """Coefficients c_0..c_R of the (possibly asymptotic) moment polynomial
    P(x) = sum_r c_r x^(k^2 - r)."""

    k: object
    coefficients: list
    is_full: bool
    method: str
    digits: int
    prime_cutoff: int
    meta: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def to_json_dict(self, ctx: PrecisionContext) -> dict:
        mp = ctx.mp
        d = self.digits

        def enc(x):
            if getattr(x, "imag", 0) != 0:
                return [mp.nstr(x.real, d, strip_zeros=False),
                        mp.nstr(x.imag, d, strip_zeros=False)]
            return mp.nstr(getattr(x, "real", x), d, strip_zeros=False)

        return {
            "schema": 1,
            "k": enc(self.k),
            "coefficients": [enc(c) for c in self.coefficients],
            "is_full": self.is_full,
            "method": self.method,
            "digits": self.digits,
            "prime_cutoff": self.prime_cutoff,
            **({"meta": self.meta} if self.meta else {}),
        }

    @staticmethod
    def from_json_dict(doc: dict, ctx: PrecisionContext) -> "MomentPolynomial":
        mp = ctx.mp

        def dec(v):
            if isinstance(v, list):
                return mp.mpc(mp.mpf(v[0]), mp.mpf(v[1]))
            return mp.mpf(v)

        return MomentPolynomial(
            dec(doc["k"]),
            [dec(c) for c in doc["coefficients"]],
            doc["is_full"],
            doc["method"],
            doc["digits"],
            doc["prime_cutoff"],
            doc.get("meta", {}),
        )


def is_positive_integer(k) -> bool:
    if getattr(k, "imag", 0) != 0:
        return False
    kr = getattr(k, "real", k)
    return kr > 0 and kr == int(kr)


def leading_factorial_product(k, ctx: PrecisionContext):
    """prod_{l=0}^{k-1} l!/(k+l)! continued off the positive integers as
    BarnesG(k+1)^2 / BarnesG(2k+1)."""
    mp = ctx.mp
    if is_positive_integer(k):
        ki = int(getattr(k, "real", k))
        frac = Fraction(1)
        for l in range(ki):
            frac *= Fraction(math.factorial(l), math.factorial(ki + l))
        return ctx.convert(frac)
    kv = ctx.convert(k)
    return mp.barnesg(kv + 1) ** 2 / mp.barnesg(2 * kv + 1)


def moment_coefficient(k, r: int, arith: ArithmeticCoefficients,
                       nk_table: NkTable | None, ctx: PrecisionContext):
    """c_r(k): leading coefficient times the weight-r shape sum
    2^(1-delta) * b(shape) * N(shape)."""
    mp = ctx.mp
    kv = ctx.convert(k)
    if r > arith.order:
        raise ValueError("r exceeds the truncation order of the coefficients")
    lead = arith.a_k * leading_factorial_product(kv, ctx)
    if r == 0:
        return lead
    integer_k = is_positive_integer(kv)
    ki = int(getattr(kv, "real", kv)) if integer_k else None
    total = kv * 0
    for shape in shapes_of_weight(r):
        if integer_k:
            # factors for shapes spanning more variables than exist vanish
            if shape.span > ki:
                continue
            nval = raw_det_factor(ki, shape)
            nk = ctx.convert(nval)
        else:
            if nk_table is None:
                raise MissingShape("no determinant-factor table supplied")
            poly = nk_table.table.get(shape)
            if poly is None:
                raise MissingShape(f"determinant factor missing for {shape}")
            nk = evaluate_kpoly(poly, kv, ctx)
        if nk == 0:
            continue
        bval = arith.b.get(shape)
        if bval is None:
            raise MissingShape(f"integrand coefficient missing for {shape}")
        total = total + 2 ** (1 - delta(shape)) * bval * nk
    return lead * total


DEFAULT_ORDER_NONINTEGER = 7


def build_polynomial(k, order: int | None, digits: int, prime_cutoff: int,
                     nk_table: NkTable | None = None,
                     arith: ArithmeticCoefficients | None = None,
                     progress: bool = False, workers: int = 1,
                     cache_dir: str | None = None) -> MomentPolynomial:
    """Coefficients c_0..c_order at k by the shape-sum route.

    For positive integer k the natural depth is min(9, k^2) and reaching
    past order 9 requires the shift method instead.
    """
    ctx = PrecisionContext(digits)
    kv = ctx.convert(k)
    integer_k = is_positive_integer(kv)
    if order is None:
        order = min(9, int(kv.real) ** 2) if integer_k else DEFAULT_ORDER_NONINTEGER
    if integer_k and order > 9:
        raise ValueError("shape-sum route is truncated at order 9; "
                         "use the shift method for deeper integer-k runs")
    if not integer_k and nk_table is None:
        nk_table = NkTable()
        nk_table.ensure_weight(order)
    if arith is None or arith.order < order:
        arith = integrand_coefficients(kv, order, prime_cutoff, ctx,
                                       progress=progress, workers=workers,
                                       cache_dir=cache_dir)
    coeffs = [moment_coefficient(kv, r, arith, nk_table, ctx)
              for r in range(order + 1)]
    is_full = integer_k and order == int(kv.real) ** 2
    return MomentPolynomial(kv, coeffs, is_full, "shape-sum", digits,
                            prime_cutoff)


def evaluate_polynomial(poly: MomentPolynomial, x, ctx: PrecisionContext):
    """P(x) = sum_r c_r x^(k^2-r); x must be positive when k^2-r is not a
    nonnegative integer."""
    mp = ctx.mp
    xv = ctx.convert(x)
    kv = ctx.convert(poly.k)
    k2 = kv * kv
    integer_exps = is_positive_integer(kv)
    if not integer_exps and not (getattr(xv, "imag", 0) == 0 and xv > 0):
        raise DomainError("x must be positive for non-integer exponents")
    total = xv * 0 + kv * 0
    for r, c in enumerate(poly.coefficients):
        e = k2 - r
        if integer_exps:
            term = c * xv ** int(e.real)
        else:
            term = c * mp.exp(e * mp.log(xv))
        total = total + term
    return total


def closed_form_c2(k, arith: ArithmeticCoefficients, table, ctx: PrecisionContext):
    """c_2 via the explicit simplification (second code path, used to
    cross-check the generic shape sum): lead * k^2(k-1)(k+1) *
    (2(B(1;)+gk)^2 - g^2 - 2g_1 + B(1,1;) - B(1;1))."""
    kv = ctx.convert(k)
    g0 = table[0]
    g1 = table[1]
    B1 = arith.B[Shape((1,), ())]
    B11 = arith.B[Shape((1, 1), ())]
    B1_1 = arith.B[Shape((1,), (1,))]
    lead = arith.a_k * leading_factorial_product(kv, ctx)
    inner = 2 * (B1 + g0 * kv) ** 2 - g0 ** 2 - 2 * g1 + B11 - B1_1
    return lead * kv * kv * (kv - 1) * (kv + 1) * inner


def polynomial_to_json(poly: MomentPolynomial, ctx: PrecisionContext) -> str:
    return json.dumps(poly.to_json_dict(ctx), indent=1)
