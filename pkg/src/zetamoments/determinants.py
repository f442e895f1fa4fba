"""Reciprocal-Gamma determinants, rearrangement sums, and the exact
polynomial-in-k combinatorial factors obtained by interpolation.

The 2k x 2k determinant is evaluated exactly: rows are scaled to integers
(clearing the reciprocal factorials) and reduced by fraction-free Bareiss
elimination.  Row contents depend only on the offset value i + entry, so
determinants are memoized against the sorted offset multisets, with signs
restored from the sorting permutations.
"""

from __future__ import annotations

import functools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import ComplementUndefined, ShapeTooWide
from .precision import KPolynomial, interpolate_kpoly
from .shapes import Shape

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - gmpy2 is present in normal installs
    def mpz(x):
        return x


# ---------------------------------------------------------------------------
# distinct rearrangements


def distinct_permutations(values):
    """All distinct permutations of a multiset, lexicographic order."""
    vals = sorted(values)
    n = len(vals)
    out = [tuple(vals)]
    cur = vals[:]
    while True:
        i = n - 2
        while i >= 0 and cur[i] >= cur[i + 1]:
            i -= 1
        if i < 0:
            return out
        j = n - 1
        while cur[j] <= cur[i]:
            j -= 1
        cur[i], cur[j] = cur[j], cur[i]
        cur[i + 1:] = reversed(cur[i + 1:])
        out.append(tuple(cur))


def survives_pruning(k: int, sigma_alpha, tau_beta) -> bool:
    """True when the rearrangement can give a nonzero determinant: the
    leading k-|alpha| entries of sigma(alpha) are zero, likewise for beta."""
    wa = sum(sigma_alpha)
    wb = sum(tau_beta)
    lead_a = max(0, k - wa)
    lead_b = max(0, k - wb)
    return all(x == 0 for x in sigma_alpha[:lead_a]) and all(
        x == 0 for x in tau_beta[:lead_b]
    )


# ---------------------------------------------------------------------------
# exact determinant core


def _bareiss_det(M) -> int:
    """Fraction-free Bareiss determinant of a square integer matrix."""
    n = len(M)
    if n == 0:
        return 1
    M = [row[:] for row in M]
    sign = 1
    prev = mpz(1)
    for c in range(n - 1):
        if M[c][c] == 0:
            piv = None
            for r in range(c + 1, n):
                if M[r][c] != 0:
                    piv = r
                    break
            if piv is None:
                return 0
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        pivot = M[c][c]
        for r in range(c + 1, n):
            mr = M[r]
            mc = M[c]
            f = mr[c]
            if f == 0:
                for j in range(c + 1, n):
                    mr[j] = (pivot * mr[j]) // prev
            else:
                for j in range(c + 1, n):
                    mr[j] = (pivot * mr[j] - f * mc[j]) // prev
            mr[c] = 0
        prev = pivot
    return sign * int(M[n - 1][n - 1])


def _falling_block(two_k: int, s: int):
    """Scaled integer row for offset s: entry j = (2k-s)!/(2k+1-j-s)! for
    j = 1..2k, zero once the reciprocal Gamma argument is nonpositive."""
    row = []
    prod = mpz(1)
    for j in range(1, two_k + 1):
        arg = two_k + 1 - j - s  # factorial argument of the entry
        if arg < 0:
            row.append(mpz(0))
            continue
        row.append(prod)
        if arg > 0:
            prod = prod * arg
    return row


@functools.lru_cache(maxsize=200000)
def _det_core(k: int, upper: tuple, lower: tuple) -> Fraction:
    """Determinant with sorted offset values, scaled back to a Fraction.

    upper/lower are ascending tuples of s = i + entry; the matrix rows are
    the reciprocal-factorial bands for the upper block and the same bands
    with the (-1)^j checkerboard column signs for the lower block.
    """
    two_k = 2 * k
    rows = []
    scale = Fraction(1)
    for s in upper:
        if s > two_k:
            return Fraction(0)
        rows.append(_falling_block(two_k, s))
        scale *= Fraction(1, math.factorial(two_k - s))
    for s in lower:
        if s > two_k:
            return Fraction(0)
        base = _falling_block(two_k, s)
        rows.append([(-v if j % 2 == 0 else v) for j, v in enumerate(base)])
        scale *= Fraction(1, math.factorial(two_k - s))
    det = _bareiss_det(rows)
    # (-1)^(k(k-1)/2) from pulling (-1)^(i-1) out of lower block rows
    if (k * (k - 1) // 2) % 2:
        det = -det
    return scale * det


def _sort_sign(vals):
    """(sorted tuple, permutation parity sign); None when values repeat."""
    n = len(vals)
    idx = sorted(range(n), key=lambda i: vals[i])
    svals = tuple(vals[i] for i in idx)
    for a, b in zip(svals, svals[1:]):
        if a == b:
            return None, 0
    # parity via cycle decomposition
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        ln = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = idx[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return svals, sign


def gamma_recip_det(k: int, sigma_alpha, tau_beta) -> Fraction:
    """Exact value of the 2k x 2k reciprocal-Gamma determinant for one
    rearrangement, including the (-1)^(sum beta) prefactor."""
    sigma_alpha = tuple(sigma_alpha)
    tau_beta = tuple(tau_beta)
    if len(sigma_alpha) != k or len(tau_beta) != k:
        raise ValueError("offset lists must have length k")
    s_up = tuple(i + 1 + sigma_alpha[i] for i in range(k))
    s_lo = tuple(i + 1 + tau_beta[i] for i in range(k))
    up_sorted, sgn_up = _sort_sign(s_up)
    if up_sorted is None:
        return Fraction(0)
    lo_sorted, sgn_lo = _sort_sign(s_lo)
    if lo_sorted is None:
        return Fraction(0)
    val = _det_core(k, up_sorted, lo_sorted)
    if val == 0:
        return Fraction(0)
    sign = sgn_up * sgn_lo * (-1) ** (sum(tau_beta))
    return sign * val


# ---------------------------------------------------------------------------
# raw combinatorial factor and its polynomial in k


@functools.lru_cache(maxsize=None)
def _lead_factor(k: int) -> Fraction:
    out = Fraction(1)
    for l in range(k):
        out *= Fraction(math.factorial(l), math.factorial(k + l))
    return out


def _surviving_arrangements(k: int, part):
    """Distinct zero-padded arrangements passing the pruning lemma."""
    w = sum(part)
    lead = max(0, k - w)
    window = k - lead
    if len(part) > window:
        return []
    vals = list(part) + [0] * (window - len(part))
    return [(0,) * lead + perm for perm in distinct_permutations(vals)]


def raw_det_factor(k: int, shape: Shape) -> Fraction:
    """N at one integer k: the rearrangement sum of determinants, scaled by
    2^(r - k^2) and the inverse leading factor.  Exact rational."""
    if len(shape.alpha) > k or len(shape.beta) > k:
        raise ShapeTooWide(f"{shape} needs more than {k} variables per block")
    r = shape.weight
    total = Fraction(0)
    for sa in _surviving_arrangements(k, shape.alpha):
        for tb in _surviving_arrangements(k, shape.beta):
            total += gamma_recip_det(k, sa, tb)
    return total * Fraction(2) ** (r - k * k) / _lead_factor(k)


def raw_det_factor_unpruned(k: int, shape: Shape) -> Fraction:
    """Same sum without the pruning lemma (test oracle; exponential cost)."""
    r = shape.weight
    alpha_padded = list(shape.alpha) + [0] * (k - len(shape.alpha))
    beta_padded = list(shape.beta) + [0] * (k - len(shape.beta))
    total = Fraction(0)
    for sa in distinct_permutations(alpha_padded):
        for tb in distinct_permutations(beta_padded):
            total += gamma_recip_det(k, sa, tb)
    return total * Fraction(2) ** (r - k * k) / _lead_factor(k)


@dataclass(frozen=True)
class NkPolynomial:
    shape: Shape
    poly: KPolynomial


def det_factor_polynomial(shape: Shape, extra_points: int = 2) -> NkPolynomial:
    """The polynomial in k (degree <= 2*weight) through raw values at
    2*weight+1 consecutive integers, verified on extra consistency points."""
    w = shape.weight
    bound = 2 * w
    k0 = max(shape.span, 1)
    points = []
    for k in range(k0, k0 + bound + 1 + extra_points):
        points.append((k, raw_det_factor(k, shape)))
    poly = interpolate_kpoly(points, bound)
    return NkPolynomial(shape, poly)


# ---------------------------------------------------------------------------
# binomial-determinant cross-check (independent second implementation)


def binomial_det(k: int, e, f) -> Fraction:
    """The same 2k x 2k determinant evaluated through the k x k binomial
    form: sgn(f) * prod_l (e_l+l)!(f_l+l)!/(l!(k+l)!) 2^(c_l-e_l-l)
    * det[binom(c_j, e_i+i-1)].

    e and f are the upper/lower offset lists (length k).  Does not include
    the (-1)^(sum beta) prefactor of the rearrangement determinant.
    """
    e = tuple(e)
    f = tuple(f)
    if len(e) != k or len(f) != k:
        raise ValueError("offset lists must have length k")
    evals = [e[i] + i for i in range(k)]
    fvals = [f[i] + i for i in range(k)]
    if len(set(evals)) != k or len(set(fvals)) != k:
        return Fraction(0)
    if any(v < 0 or v > 2 * k - 1 for v in fvals):
        raise ComplementUndefined("f offsets must embed into {0,...,2k-1}")
    fset = set(fvals)
    c = [v for v in range(2 * k) if v not in fset]
    _, sgn_f = _sort_sign(tuple(f[i] + i + 1 for i in range(k)))
    pref = Fraction(sgn_f)
    for l in range(k):
        pref *= Fraction(
            math.factorial(e[l] + l) * math.factorial(f[l] + l),
            math.factorial(l) * math.factorial(k + l),
        )
        pref *= Fraction(2) ** (c[l] - e[l] - l)
    M = [[mpz(math.comb(c[j], evals[i])) for j in range(k)] for i in range(k)]
    det = _bareiss_det(M)
    return pref * det


# ---------------------------------------------------------------------------
# persistent table of polynomials

NK_SCHEMA = 1


class NkTable:
    """Shape -> KPolynomial map with optional JSON persistence."""

    def __init__(self, cache_path: str | None = None):
        self.cache_path = cache_path
        self.table: dict[Shape, KPolynomial] = {}
        if cache_path and os.path.exists(cache_path):
            self._load()

    def polynomial(self, shape: Shape) -> KPolynomial:
        poly = self.table.get(shape)
        if poly is None:
            poly = det_factor_polynomial(shape).poly
            self.table[shape] = poly
            self._flush()
        return poly

    def ensure_weight(self, max_weight: int, progress=None):
        from .shapes import canonical_shapes

        missing = [s for s in canonical_shapes(max_weight) if s not in self.table]
        for n, shape in enumerate(missing):
            self.table[shape] = det_factor_polynomial(shape).poly
            if progress and (n + 1) % 20 == 0:
                progress(n + 1, len(missing))
        if missing:
            self._flush()

    def _load(self):
        with open(self.cache_path) as fh:
            doc = json.load(fh)
        if doc.get("schema") != NK_SCHEMA:
            return
        for key, coeffs in doc["entries"].items():
            a, b = key.split("|")
            shape = Shape(
                tuple(int(x) for x in a.split(",") if x),
                tuple(int(x) for x in b.split(",") if x),
            )
            self.table[shape] = KPolynomial.from_list(
                [Fraction(c) for c in coeffs]
            )

    def _flush(self):
        if not self.cache_path:
            return
        os.makedirs(os.path.dirname(self.cache_path) or ".", exist_ok=True)
        doc = {
            "schema": NK_SCHEMA,
            "entries": {
                ",".join(map(str, s.alpha)) + "|" + ",".join(map(str, s.beta)):
                [str(c) for c in poly.coefficients]
                for s, poly in sorted(self.table.items(), key=lambda kv: kv[0].sort_key())
            },
        }
        tmp = self.cache_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(doc, fh, indent=1)
        os.replace(tmp, self.cache_path)
