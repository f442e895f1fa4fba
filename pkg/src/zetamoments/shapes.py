"""Exponent shapes and truncated symmetric multivariate series.

A shape (alpha; beta) is a pair of weakly decreasing positive-integer
tuples indexing one symmetrized class of monomials in the two blocks of
variables z_1..z_k and z_{k+1}..z_{2k}.  A SymmetricSeries stores one
coefficient per canonical shape; the mirror class (beta; alpha) carries
the sign (-1)^(|alpha|+|beta|).

Series multiplication enumerates exponent splittings of a representative
monomial, which is independent of k; exp and log run a single splitting
pass via the total-degree (Euler operator) recurrence.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .errors import NonzeroConstant, ShapeTooWide

Part = tuple[int, ...]  # weakly decreasing positive integers


@dataclass(frozen=True)
class Shape:
    alpha: Part
    beta: Part

    def __post_init__(self):
        for part in (self.alpha, self.beta):
            if any(x <= 0 for x in part):
                raise ValueError("shape entries must be positive (zeros suppressed)")
            if list(part) != sorted(part, reverse=True):
                raise ValueError("shape entries must be weakly decreasing")

    @property
    def weight(self) -> int:
        return sum(self.alpha) + sum(self.beta)

    @property
    def span(self) -> int:
        """Active variables needed per block: max(len(alpha), len(beta))."""
        return max(len(self.alpha), len(self.beta))

    def swapped(self) -> "Shape":
        return Shape(self.beta, self.alpha)

    def is_canonical(self) -> bool:
        return self.alpha >= self.beta

    def sort_key(self):
        return (self.weight, self.alpha, self.beta)

    def __str__(self):
        return "(%s;%s)" % (",".join(map(str, self.alpha)), ",".join(map(str, self.beta)))


EMPTY = Shape((), ())


def shape_of(alpha, beta) -> Shape:
    return Shape(tuple(alpha), tuple(beta))


def weight(shape: Shape) -> int:
    return shape.weight


def canonicalize(alpha, beta) -> tuple[Shape, int]:
    """Sort both exponent lists, drop zeros, and orient so alpha >= beta.

    Returns (canonical shape, sign), the sign being (-1)^weight when the
    two blocks had to be swapped.
    """
    a = tuple(sorted((x for x in alpha if x), reverse=True))
    b = tuple(sorted((x for x in beta if x), reverse=True))
    if a >= b:
        return Shape(a, b), 1
    return Shape(b, a), (-1) ** (sum(a) + sum(b))


def monomial_count(shape: Shape, k: int) -> int:
    """Number of monomials in the symmetrized class of the shape,
    2^(1-delta) (k!)^2 / (prod m_alpha(j)! prod m_beta(j)!)."""
    if len(shape.alpha) > k or len(shape.beta) > k:
        raise ShapeTooWide(f"shape {shape} does not fit in {k} variables per block")
    import math

    count = 2 ** (1 - delta(shape))
    for part in (shape.alpha, shape.beta):
        mult: dict[int, int] = {0: k - len(part)}
        for v in part:
            mult[v] = mult.get(v, 0) + 1
        num = math.factorial(k)
        for m in mult.values():
            num //= math.factorial(m)
        count *= num
    return count


def delta(shape: Shape) -> int:
    """1 when alpha equals beta, else 0."""
    return 1 if shape.alpha == shape.beta else 0


@functools.lru_cache(maxsize=None)
def partitions(n: int) -> tuple[Part, ...]:
    """All partitions of n as weakly decreasing tuples (lexicographic)."""
    if n == 0:
        return ((),)
    out = []

    def rec(rest, maxpart, prefix):
        if rest == 0:
            out.append(tuple(prefix))
            return
        for p in range(min(rest, maxpart), 0, -1):
            prefix.append(p)
            rec(rest - p, p, prefix)
            prefix.pop()

    rec(n, n, [])
    return tuple(sorted(out))


@functools.lru_cache(maxsize=None)
def canonical_shapes(max_weight: int) -> tuple[Shape, ...]:
    """All canonical shapes of weight 1..max_weight, sorted by
    (weight, alpha, beta)."""
    out = []
    for w in range(1, max_weight + 1):
        for a in range(w + 1):
            for pa in partitions(a):
                for pb in partitions(w - a):
                    if pa >= pb:
                        out.append(Shape(pa, pb))
    return tuple(sorted(out, key=Shape.sort_key))


@functools.lru_cache(maxsize=None)
def shapes_of_weight(w: int) -> tuple[Shape, ...]:
    return tuple(s for s in canonical_shapes(w) if s.weight == w)


# ---------------------------------------------------------------------------
# splitting tables


def _splittings_of_part(exponents: Part):
    """All ways to split each exponent e into (e1, e2), e1+e2 = e."""
    if not exponents:
        return [((), ())]
    rest = _splittings_of_part(exponents[1:])
    e = exponents[0]
    out = []
    for a in range(e + 1):
        for r1, r2 in rest:
            out.append(((a,) + r1, (e - a,) + r2))
    return out


@functools.lru_cache(maxsize=None)
def splitting_table(shape: Shape):
    """For a canonical target shape, the list of (shape1, sign1, w1,
    shape2, sign2, w2) over all splittings of its representative monomial."""
    out = []
    for a1, a2 in _splittings_of_part(shape.alpha):
        for b1, b2 in _splittings_of_part(shape.beta):
            s1, g1 = canonicalize(a1, b1)
            s2, g2 = canonicalize(a2, b2)
            out.append((s1, g1, s1.weight, s2, g2, s2.weight))
    return tuple(out)


# ---------------------------------------------------------------------------
# the series type


@dataclass
class SymmetricSeries:
    """Truncated series keyed by canonical shapes of weight 1..order."""

    order: int
    constant: object
    coefficients: dict[Shape, object] = field(default_factory=dict)

    def coeff(self, shape: Shape):
        return self.coefficients.get(shape, self.constant * 0)

    def items_sorted(self):
        return sorted(self.coefficients.items(), key=lambda kv: kv[0].sort_key())

    def copy(self) -> "SymmetricSeries":
        return SymmetricSeries(self.order, self.constant, dict(self.coefficients))

    def scaled(self, factor) -> "SymmetricSeries":
        return SymmetricSeries(
            self.order,
            self.constant * factor,
            {s: c * factor for s, c in self.coefficients.items()},
        )

    def plus(self, other: "SymmetricSeries") -> "SymmetricSeries":
        if other.order != self.order:
            raise ValueError("series orders differ")
        out = self.copy()
        out.constant = out.constant + other.constant
        for s, c in other.coefficients.items():
            out.coefficients[s] = out.coefficients.get(s, c * 0) + c
        return out

    def prune_tiny(self, threshold) -> "SymmetricSeries":
        """Drop coefficients with |c| <= threshold (0 keeps everything)."""
        return SymmetricSeries(
            self.order,
            self.constant,
            {s: c for s, c in self.coefficients.items() if abs(c) > threshold},
        )


def series_one(order: int, one) -> SymmetricSeries:
    return SymmetricSeries(order, one, {})


def series_multiply(s1: SymmetricSeries, s2: SymmetricSeries, k=None) -> SymmetricSeries:
    """Product of two symmetric series, truncated to the common order.

    The splitting enumeration is independent of the number of variables;
    the k argument is accepted for contract parity and is unused.
    """
    if s1.order != s2.order:
        raise ValueError("series orders must agree")
    order = s1.order
    zero = s1.constant * 0
    out = SymmetricSeries(order, s1.constant * s2.constant, {})
    c1 = s1.coefficients
    c2 = s2.coefficients
    k1const = s1.constant
    k2const = s2.constant
    for target in canonical_shapes(order):
        acc = zero
        for sh1, g1, w1, sh2, g2, w2 in splitting_table(target):
            if w1 == 0:
                v1 = k1const
            else:
                v1 = c1.get(sh1)
                if v1 is None:
                    continue
                if g1 < 0:
                    v1 = -v1
            if w2 == 0:
                v2 = k2const
            else:
                v2 = c2.get(sh2)
                if v2 is None:
                    continue
                if g2 < 0:
                    v2 = -v2
            acc = acc + v1 * v2
        if acc != 0:
            out.coefficients[target] = acc
    return out


def series_exp(s: SymmetricSeries, k=None) -> SymmetricSeries:
    """exp of a series with zero constant term (single splitting pass).

    Euler-operator recurrence: w*E(T) = sum over splittings T = U+V with
    V nonempty of E(U) * weight(V) * L(V).
    """
    if s.constant != 0:
        raise NonzeroConstant("series_exp requires zero constant term")
    order = s.order
    zero = s.constant * 0
    one = zero + 1
    L = s.coefficients
    E: dict[Shape, object] = {}
    for target in canonical_shapes(order):
        w = target.weight
        acc = zero
        for sh1, g1, w1, sh2, g2, w2 in splitting_table(target):
            if w2 == 0:
                continue
            v2 = L.get(sh2)
            if v2 is None:
                continue
            if w1 == 0:
                v1 = one
            else:
                v1 = E.get(sh1)
                if v1 is None:
                    continue
                if g1 < 0:
                    v1 = -v1
            if g2 < 0:
                v2 = -v2
            acc = acc + v1 * (w2 * v2)
        if acc != 0:
            E[target] = acc / w
    return SymmetricSeries(order, one, E)


def series_log(s: SymmetricSeries, k=None) -> SymmetricSeries:
    """log of a series with constant term 1 (single splitting pass).

    Recurrence: w*L(T) = w*S(T) - sum over splittings T = U+V with U, V
    nonempty of S(U) * weight(V) * L(V).
    """
    if s.constant != 1:
        raise ValueError("series_log requires constant term 1")
    order = s.order
    zero = s.constant * 0
    S = s.coefficients
    L: dict[Shape, object] = {}
    for target in canonical_shapes(order):
        w = target.weight
        acc = w * S.get(target, zero)
        for sh1, g1, w1, sh2, g2, w2 in splitting_table(target):
            if w2 == 0 or w1 == 0 or w2 == w:
                continue
            v1 = S.get(sh1)
            if v1 is None:
                continue
            v2 = L.get(sh2)
            if v2 is None:
                continue
            if g1 < 0:
                v1 = -v1
            if g2 < 0:
                v2 = -v2
            acc = acc - v1 * (w2 * v2)
        if acc != 0:
            L[target] = acc / w
    return SymmetricSeries(order, zero, L)


# ---------------------------------------------------------------------------
# dense (index-based) fast path for the per-prime inner loop


@functools.lru_cache(maxsize=None)
def dense_tables(order: int):
    """Index-compiled shape tables for a given truncation order.

    Returns (shapes, index, log_rows) where shapes is the sorted tuple of
    canonical shapes, index maps shape -> position, and log_rows[i] is the
    tuple (weight, entries) driving the dense log recurrence for target i:
    entries are (i1, i2, scale) with scale = +-w2 folded in, both parts
    nonempty.
    """
    shapes = canonical_shapes(order)
    index = {sh: i for i, sh in enumerate(shapes)}
    log_rows = []
    for target in shapes:
        entries = []
        for sh1, g1, w1, sh2, g2, w2 in splitting_table(target):
            if w1 == 0 or w2 == 0:
                continue
            entries.append((index[sh1], index[sh2], g1 * g2 * w2))
        log_rows.append((target.weight, tuple(entries)))
    return shapes, index, tuple(log_rows)


def dense_log(values: list, order: int) -> list:
    """log of a dense coefficient vector (constant assumed 1).

    `values` is indexed like canonical_shapes(order); returns the dense
    vector of log coefficients.
    """
    _, _, log_rows = dense_tables(order)
    out = [None] * len(values)
    for i, (w, entries) in enumerate(log_rows):
        acc = w * values[i]
        for i1, i2, scale in entries:
            v2 = out[i2]
            if v2 == 0:
                continue
            acc = acc - scale * values[i1] * v2
        out[i] = acc / w
    return out
