"""Everything arithmetic: the Euler-product constant a(k), per-prime local
factor series, prime sums of their coefficients with tail acceleration, the
zeta-product series, and assembly of the normalized integrand Taylor
coefficients.

Conventions: coefficients are plain Taylor coefficients of the symmetrized
monomial classes (factorials absorbed), stored per canonical shape.  The
per-prime summand of a weight-w shape equals (log p)^w times a smooth
rational function of 1/p, which drives the five-point tail fit in powers
1/p^2..1/p^6.
"""

from __future__ import annotations

import json
import os
import sys
import time
from dataclasses import dataclass, field

from .errors import TailFitSingular
from .precision import PrecisionContext
from .pseries import ps_exp_linear, ps_log
from .shapes import (
    Shape,
    SymmetricSeries,
    canonical_shapes,
    dense_log,
    series_exp,
    series_multiply,
)
from .special import (
    StieltjesTable,
    _cached_primes,
    eulerian_row,
    gauss_2f1,
    prime_zeta_log,
    stieltjes,
    zeta_plus_one_series,
)

TAIL_POWERS = (2, 3, 4, 5, 6)
PROBE_OFFSETS = (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7)


@dataclass
class LocalFactorSeries:
    """Truncated series of log f(t; z) for one local factor, constant
    separated out (it equals k^2 log(1-t) + log 2F1(k,k;1;t))."""

    t: object
    constant: object
    series: SymmetricSeries


@dataclass
class ArithmeticCoefficients:
    """Prime-sum data for one k: the Euler-product constant, the log-series
    coefficients (prime sums), and the normalized integrand coefficients."""

    k: object
    a_k: object
    B: dict[Shape, object]
    b: dict[Shape, object]
    order: int
    prime_cutoff: int
    digits: int


# ---------------------------------------------------------------------------
# one local factor


def _one_var_log_coeffs(t, order: int, ctx: PrecisionContext):
    """Taylor coefficients h_0..h_order of log(1 - t^(1+s)) in s.

    h_0 = log(1-t); each h_n carries a factor log(t)^n.
    """
    mp = ctx.mp
    L = mp.log(t)
    n = order + 1
    # jet of t * exp(s L)
    w = ps_exp_linear(L, n, mp.mpf(1))
    w = [t * c for c in w]
    onemw = [1 - w[0]] + [-c for c in w[1:]]
    return ps_log(onemw, n, mp)


def local_log_series(k, t, order: int, ctx: PrecisionContext) -> LocalFactorSeries:
    """Shape-indexed Taylor series of the log of one local factor at t.

    Two pieces: the double-log sum over (i, j) pairs expanded per variable,
    and the log of the unit-circle integral whose raw coefficients come from
    Eulerian-number expansions integrated term by term (closed 2F1 form).
    """
    mp = ctx.mp
    t = ctx.convert(t)
    kv = ctx.convert(k)
    shapes = canonical_shapes(order)
    zero = kv * 0 + mp.mpf(0)

    h = _one_var_log_coeffs(t, order, ctx)
    L = mp.log(t)

    first = {}
    for a in range(1, order + 1):
        first[Shape((a,), ())] = kv * h[a]
    for a in range(1, order + 1):
        for b in range(1, min(a, order - a) + 1):
            # representative z_1^a z_{k+1}^b; canonical since a >= b
            first[Shape((a,), (b,))] = first.get(Shape((a,), (b,)), zero) + (
                mp.binomial(a + b, a) * (-1) ** b * h[a + b]
            )

    # raw coefficients of the theta integral, normalized by its value at 0
    f1 = gauss_2f1(kv, kv, 1, t, ctx)
    inv_f1 = 1 / f1
    two_f1_cache: dict[tuple[int, int, int], object] = {}

    def theta_part(a_tot: int, b_tot: int, C: int):
        """t^((U+V)/2) * integral, with the half-powers combined so only
        integer powers of t appear: t^max(U,V) binom 2F1."""
        key = (a_tot, b_tot, C)
        val = two_f1_cache.get(key)
        if val is None:
            A = kv + a_tot
            B = kv + b_tot
            if C >= 0:
                binom = mp.mpf(1) + A * 0
                for i in range(C):
                    binom = binom * (B + C - 1 - i)
                binom /= mp.factorial(C)
                val = binom * gauss_2f1(A, B + C, C + 1, t, ctx)
            else:
                c = -C
                binom = mp.mpf(1) + A * 0
                for i in range(c):
                    binom = binom * (A + c - 1 - i)
                binom /= mp.factorial(c)
                val = binom * gauss_2f1(B, A + c, c + 1, t, ctx)
            two_f1_cache[key] = val
        return val

    tpow = [mp.mpf(1)]
    for _ in range(order + 1):
        tpow.append(tpow[-1] * t)

    def raw_coefficient(shape: Shape):
        a_tot = sum(shape.alpha)
        b_tot = sum(shape.beta)
        # iterate Eulerian index tuples u_i in [0, alpha_i), v_j in [0, beta_j)
        ucombo = [(0, 1, ())]  # (sum of (u+1), product of E, tuple)
        for ai in shape.alpha:
            row = eulerian_row(ai)
            ucombo = [
                (s + l + 1, prod * row[l], tup + (l,))
                for (s, prod, tup) in ucombo
                for l in range(ai)
            ]
        vcombo = [(0, 1, ())]
        for bj in shape.beta:
            row = eulerian_row(bj)
            vcombo = [
                (s + l + 1, prod * row[l], tup + (l,))
                for (s, prod, tup) in vcombo
                for l in range(bj)
            ]
        acc = zero
        for U, eu, _ in ucombo:
            for V, ev, _ in vcombo:
                acc = acc + (eu * ev) * tpow[max(U, V)] * theta_part(a_tot, b_tot, U - V)
        sign = (-1) ** b_tot
        scale = sign * L ** (a_tot + b_tot)
        fact = 1
        for ai in shape.alpha:
            fact *= mp.factorial(ai)
        for bj in shape.beta:
            fact *= mp.factorial(bj)
        return acc * scale * inv_f1 / fact

    raw = [raw_coefficient(sh) for sh in shapes]
    logint = dense_log(raw, order)

    coeffs = {}
    for i, sh in enumerate(shapes):
        val = logint[i] + first.get(sh, zero)
        coeffs[sh] = val
    constant = kv * kv * mp.log(1 - t) + mp.log(f1)
    return LocalFactorSeries(t, constant, SymmetricSeries(order, zero, coeffs))


# ---------------------------------------------------------------------------
# prime sums with the five-point tail fit


def _solve_dense(A, b):
    """Gaussian elimination with partial pivoting over mpmath numbers."""
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(M[r][c]))
        if M[piv][c] == 0:
            raise TailFitSingular("tail-fit system is singular; raise the prime cutoff")
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                for j in range(c, n + 1):
                    M[r][j] -= f * M[c][j]
    return [M[i][n] / M[i][i] for i in range(n)]


@dataclass
class PrimeSums:
    """Accumulated per-prime data for one (k, order, cutoff, precision)."""

    k: object
    order: int
    prime_cutoff: int
    constant_total: object          # sum over p <= P of the series constant
    constant_tail: object           # fitted correction for p > P
    B: dict[Shape, object]          # full prime sums per canonical shape
    digits: int


_PRIME_SUMS_CACHE: dict[tuple, PrimeSums] = {}


def _progress(enabled, msg):
    if enabled:
        print(msg, file=sys.stderr, flush=True)


def prime_sums(k, order: int, prime_cutoff: int, ctx: PrecisionContext,
               progress: bool = False, workers: int = 1) -> PrimeSums:
    """Sum the local log-series coefficients over primes p <= cutoff and
    accelerate the p > cutoff tail by the five-probe fit in 1/p^2..1/p^6.

    The direct part sums in ascending-prime order (deterministic); with
    workers > 1 the primes are cut into fixed-size chunks reduced in chunk
    order, so results are identical for any worker count.
    """
    if prime_cutoff < 100:
        raise ValueError("prime cutoff must be >= 100")
    mp = ctx.mp
    kv = ctx.convert(k)
    key = (mp.nstr(kv, ctx.effective_digits), order, prime_cutoff, ctx.effective_digits)
    hit = _PRIME_SUMS_CACHE.get(key)
    if hit is not None:
        return hit

    shapes = canonical_shapes(order)
    zero = kv * 0 + mp.mpf(0)
    primes = _cached_primes(prime_cutoff)

    t0 = time.time()
    if workers > 1:
        totals, const_total, front = _prime_loop_parallel(
            kv, order, primes, ctx, workers, progress)
    else:
        totals, const_total, front = _prime_loop_serial(
            kv, order, primes, ctx, progress)
    _progress(progress, "  primes %d done in %.1fs" % (len(primes), time.time() - t0))

    # tail: probe the summand at five non-prime points past the cutoff
    probes = [prime_cutoff + off for off in PROBE_OFFSETS]
    probe_series = []
    for q in probes:
        tq = mp.mpf(1) / q
        probe_series.append(local_log_series(kv, tq, order, ctx))

    # residual prime power sums sum_{p>P} log(p)^w / p^j
    resid = {}
    for j in TAIL_POWERS:
        for w in range(order + 1):
            resid[(w, j)] = prime_zeta_log(w, j, ctx) - front[(w, j)]

    mat_rows = []
    logq = [mp.log(q) for q in probes]
    for i, q in enumerate(probes):
        tq = mp.mpf(1) / q
        mat_rows.append([tq ** j for j in TAIL_POWERS])

    def fit_tail(values, w):
        rhs = [values[i] / logq[i] ** w for i in range(len(probes))]
        d = _solve_dense([row[:] for row in mat_rows], rhs)
        tail = zero
        for dj, j in zip(d, TAIL_POWERS):
            tail = tail + dj * resid[(w, j)]
        return tail

    const_tail = fit_tail([ls.constant for ls in probe_series], 0)
    B = {}
    for idx, sh in enumerate(shapes):
        w = sh.weight
        vals = [ps.series.coefficients[sh] for ps in probe_series]
        B[sh] = totals[idx] + fit_tail(vals, w)

    out = PrimeSums(kv, order, prime_cutoff, const_total, const_tail, B, ctx.effective_digits)
    _PRIME_SUMS_CACHE[key] = out
    return out


def _prime_loop_serial(kv, order, primes, ctx, progress):
    mp = ctx.mp
    shapes = canonical_shapes(order)
    zero = kv * 0 + mp.mpf(0)
    totals = [zero] * len(shapes)
    const_total = zero
    front = {(w, j): mp.mpf(0) for j in TAIL_POWERS for w in range(order + 1)}
    report = max(1, len(primes) // 8)
    for n, p in enumerate(primes):
        t = mp.mpf(1) / p
        ls = local_log_series(kv, t, order, ctx)
        const_total += ls.constant
        co = ls.series.coefficients
        for i, sh in enumerate(shapes):
            totals[i] = totals[i] + co[sh]
        lp = mp.log(p)
        lw = mp.mpf(1)
        pj0 = t * t
        for w in range(order + 1):
            pj = pj0
            for j in TAIL_POWERS:
                front[(w, j)] += lw * pj
                pj *= t
            lw *= lp
        if progress and (n + 1) % report == 0:
            _progress(True, "  prime %d/%d" % (n + 1, len(primes)))
    return totals, const_total, front


def _chunk_args(kv, order, primes, ctx, workers):
    chunk = 1024
    chunks = [primes[i:i + chunk] for i in range(0, len(primes), chunk)]
    is_complex = getattr(kv, "imag", 0) != 0
    if is_complex:
        k_str = (kv.real._mpf_, kv.imag._mpf_)
    else:
        k_str = getattr(kv, "real", kv)._mpf_
    return [(k_str, is_complex, order, c, ctx.decimal_digits, ctx.guard_digits)
            for c in chunks]


def _pack(x):
    """Pickle-safe encoding of an mpf/mpc from a private context."""
    if getattr(x, "imag", 0) != 0:
        return ("c", x.real._mpf_, x.imag._mpf_)
    x = getattr(x, "real", x)
    return ("r", x._mpf_)


def _unpack(tup, mp):
    if tup[0] == "c":
        return mp.make_mpc((tup[1], tup[2]))
    return mp.make_mpf(tup[1])


def _chunk_worker(args):
    k_str, is_complex, order, primes, dd, gd = args
    ctx = PrecisionContext(dd, gd)
    mp = ctx.mp
    kv = mp.make_mpc(k_str) if is_complex else mp.make_mpf(k_str)
    totals, const_total, front = _prime_loop_serial(kv, order, primes, ctx, False)
    return ([_pack(x) for x in totals], _pack(const_total),
            {key: _pack(v) for key, v in front.items()})


def _prime_loop_parallel(kv, order, primes, ctx, workers, progress):
    from concurrent.futures import ProcessPoolExecutor

    mp = ctx.mp
    shapes = canonical_shapes(order)
    zero = kv * 0 + mp.mpf(0)
    args = _chunk_args(kv, order, list(primes), ctx, workers)
    totals = [zero] * len(shapes)
    const_total = zero
    front = {(w, j): mp.mpf(0) for j in TAIL_POWERS for w in range(order + 1)}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for nc, (tt, cc, ff) in enumerate(pool.map(_chunk_worker, args)):
            for i in range(len(totals)):
                totals[i] = totals[i] + _unpack(tt[i], mp)
            const_total = const_total + _unpack(cc, mp)
            for key in front:
                front[key] += _unpack(ff[key], mp)
            _progress(progress, "  chunk %d/%d" % (nc + 1, len(args)))
    return totals, const_total, front


# ---------------------------------------------------------------------------
# public operations


def arithmetic_factor(k, prime_cutoff: int, ctx: PrecisionContext,
                      progress: bool = False, workers: int = 1):
    """The Euler-product constant: product over p of
    (1-1/p)^(k^2) 2F1(k,k;1;1/p), tail-corrected past the cutoff."""
    mp = ctx.mp
    kv = ctx.convert(k)
    if kv == 0:
        return mp.mpf(1)
    ps = prime_sums(kv, 0, prime_cutoff, ctx, progress=progress, workers=workers)
    return mp.exp(ps.constant_total + ps.constant_tail)


def compute_B(k, order: int, prime_cutoff: int, ctx: PrecisionContext,
              progress: bool = False, workers: int = 1) -> dict[Shape, object]:
    """Prime sums of the local log-series coefficients per canonical shape."""
    ps = prime_sums(k, order, prime_cutoff, ctx, progress=progress, workers=workers)
    return dict(ps.B)


def zeta_product_series(k, order: int, table: StieltjesTable,
                        ctx: PrecisionContext) -> SymmetricSeries:
    """Series of prod (z_i - z_{j+k}) zeta(1 + z_i - z_{j+k}), built from the
    one-variable expansion of log(s zeta(1+s)) and a single exp pass."""
    mp = ctx.mp
    kv = ctx.convert(k)
    zero = kv * 0 + mp.mpf(0)
    g = ps_log(zeta_plus_one_series(order + 1, table, ctx), order + 1, mp)
    coeffs = {}
    for a in range(1, order + 1):
        coeffs[Shape((a,), ())] = kv * g[a]
    for a in range(1, order + 1):
        for b in range(1, min(a, order - a) + 1):
            coeffs[Shape((a,), (b,))] = coeffs.get(Shape((a,), (b,)), zero) + (
                mp.binomial(a + b, a) * (-1) ** b * g[a + b]
            )
    logser = SymmetricSeries(order, zero, coeffs)
    return series_exp(logser)


def integrand_coefficients(k, order: int, prime_cutoff: int, ctx: PrecisionContext,
                           progress: bool = False, workers: int = 1,
                           cache_dir: str | None = None) -> ArithmeticCoefficients:
    """Full assembly: B sums, the Euler-product constant, and the normalized
    integrand coefficients b = exp(B-series) * zeta-product-series."""
    mp = ctx.mp
    kv = ctx.convert(k)
    if kv == 0:
        one = mp.mpf(1)
        return ArithmeticCoefficients(kv, one, {}, {Shape((), ()): one}, order,
                                      prime_cutoff, ctx.effective_digits)
    cached = _load_arith_cache(cache_dir, kv, order, prime_cutoff, ctx)
    if cached is not None:
        return cached
    ps = prime_sums(kv, order, prime_cutoff, ctx, progress=progress, workers=workers)
    a_k = mp.exp(ps.constant_total + ps.constant_tail)
    zero = kv * 0 + mp.mpf(0)
    bser = SymmetricSeries(order, zero, dict(ps.B))
    expB = series_exp(bser)
    table = stieltjes(max(order, 1), ctx)
    zser = zeta_product_series(kv, order, table, ctx)
    b = series_multiply(expB, zser)
    bmap = {Shape((), ()): b.constant}
    bmap.update(b.coefficients)
    out = ArithmeticCoefficients(kv, a_k, dict(ps.B), bmap, order,
                                 prime_cutoff, ctx.effective_digits)
    _store_arith_cache(cache_dir, out, ctx)
    return out


# ---------------------------------------------------------------------------
# optional JSON cache

CACHE_SCHEMA = 1


def _shape_key(sh: Shape) -> str:
    return ",".join(map(str, sh.alpha)) + "|" + ",".join(map(str, sh.beta))


def _shape_from_key(key: str) -> Shape:
    a, b = key.split("|")
    alpha = tuple(int(x) for x in a.split(",") if x)
    beta = tuple(int(x) for x in b.split(",") if x)
    return Shape(alpha, beta)


def _num_str(x, mp, digits):
    if getattr(x, "imag", 0) != 0:
        return [mp.nstr(x.real, digits, strip_zeros=False),
                mp.nstr(x.imag, digits, strip_zeros=False)]
    return mp.nstr(getattr(x, "real", x), digits, strip_zeros=False)


def _num_from(v, mp):
    if isinstance(v, list):
        return mp.mpc(mp.mpf(v[0]), mp.mpf(v[1]))
    return mp.mpf(v)


def _arith_cache_path(cache_dir, kv, order, prime_cutoff, ctx):
    mp = ctx.mp
    kkey = mp.nstr(kv, 20).replace(" ", "")
    name = f"arith_v{CACHE_SCHEMA}_k{kkey}_R{order}_P{prime_cutoff}_d{ctx.effective_digits}.json"
    return os.path.join(cache_dir, name)


def _load_arith_cache(cache_dir, kv, order, prime_cutoff, ctx):
    if not cache_dir:
        return None
    path = _arith_cache_path(cache_dir, kv, order, prime_cutoff, ctx)
    if not os.path.exists(path):
        return None
    mp = ctx.mp
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != CACHE_SCHEMA:
        return None
    return ArithmeticCoefficients(
        kv,
        _num_from(doc["a_k"], mp),
        {_shape_from_key(s): _num_from(v, mp) for s, v in doc["B"].items()},
        {_shape_from_key(s): _num_from(v, mp) for s, v in doc["b"].items()},
        doc["order"],
        doc["prime_cutoff"],
        doc["digits"],
    )


def _store_arith_cache(cache_dir, arith: ArithmeticCoefficients, ctx):
    if not cache_dir:
        return
    os.makedirs(cache_dir, exist_ok=True)
    mp = ctx.mp
    d = ctx.effective_digits + 5
    doc = {
        "schema": CACHE_SCHEMA,
        "k": _num_str(arith.k, mp, d),
        "order": arith.order,
        "prime_cutoff": arith.prime_cutoff,
        "digits": arith.digits,
        "a_k": _num_str(arith.a_k, mp, d),
        "B": {_shape_key(s): _num_str(v, mp, d) for s, v in sorted(
            arith.B.items(), key=lambda kv_: kv_[0].sort_key())},
        "b": {_shape_key(s): _num_str(v, mp, d) for s, v in sorted(
            arith.b.items(), key=lambda kv_: kv_[0].sort_key())},
    }
    path = _arith_cache_path(cache_dir, arith.k, arith.order, arith.prime_cutoff, ctx)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
