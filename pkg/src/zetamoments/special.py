"""Special functions: Gauss 2F1, the unit-circle integral behind the local
factors, Stieltjes constants, Eulerian numbers, zeta on the critical line,
and log-zeta derivatives with the Moebius-accelerated prime power sums.

All high-precision work happens through an explicit PrecisionContext.
"""

from __future__ import annotations

import functools

import mpmath
import numpy as np

from .errors import NoConvergence, PrecisionExceeded
from .pseries import ps_exp_linear, ps_log, ps_mul
from .precision import PrecisionContext

# ---------------------------------------------------------------------------
# prime tables


def sieve_primes(n: int) -> list[int]:
    """All primes <= n, ascending."""
    if n < 2:
        return []
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, int(n ** 0.5) + 1):
        if mask[i]:
            mask[i * i:: i] = False
    return np.nonzero(mask)[0].tolist()


@functools.lru_cache(maxsize=None)
def _cached_primes(n: int) -> tuple[int, ...]:
    return tuple(sieve_primes(n))


def mobius(m: int) -> int:
    """Moebius function by trial division (m stays small here)."""
    if m == 1:
        return 1
    res = 1
    x = m
    p = 2
    while p * p <= x:
        if x % p == 0:
            x //= p
            if x % p == 0:
                return 0
            res = -res
        p += 1
    if x > 1:
        res = -res
    return res


def von_mangoldt_support(n: int) -> dict[int, int]:
    """{m: p} for prime powers m = p^j <= n (support of von Mangoldt)."""
    out = {}
    for p in sieve_primes(n):
        q = p
        while q <= n:
            out[q] = p
            q *= p
    return out


# ---------------------------------------------------------------------------
# Gauss hypergeometric series


def gauss_2f1(a, b, c, t, ctx: PrecisionContext):
    """2F1(a,b;c;t) for 0 <= t < 1, c a positive integer, a and b possibly
    complex.  Straight term-by-term summation with the ratio recurrence
    (a+n)(b+n)/((c+n)(n+1)) * t, stopped one term after the relative
    threshold is met.
    """
    mp = ctx.mp
    t = ctx.convert(t)
    if not (0 <= t.real and t.real < 1 and t.imag == 0):
        raise NoConvergence(f"gauss_2f1 requires real t in [0,1), got {t}")
    if int(c) != c or c < 1:
        raise ValueError("third parameter must be a positive integer")
    a = ctx.convert(a)
    b = ctx.convert(b)
    c = mp.mpf(int(c))
    if t == 0:
        return a * 0 + b * 0 + 1
    eps = ctx.eps
    total = mp.mpf(1) + a * 0 + b * 0
    term = total * 1
    n = 0
    while True:
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * t
        total += term
        n += 1
        if abs(term) < eps * abs(total):
            break
        if n > 10_000_000:
            raise NoConvergence("gauss_2f1 series did not converge")
    term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * t
    total += term
    return total


def _binom_poly(upper, m: int, ctx: PrecisionContext):
    """binom(upper, m) with integer m >= 0 and possibly complex upper,
    expanded as the polynomial prod_{i=0}^{m-1}(upper-i)/m! (never Gamma)."""
    mp = ctx.mp
    acc = mp.mpf(1) + ctx.convert(upper) * 0
    for i in range(m):
        acc = acc * (upper - i)
    return acc / mp.factorial(m)


def theta_integral(A, B, C: int, t, ctx: PrecisionContext):
    """Integral over [0,1] of (1-e(x)sqrt(t))^-A (1-e(-x)sqrt(t))^-B e(Cx) dx.

    Closed form: t^{C/2} binom(B+C-1,C) 2F1(A,B+C;C+1;t) for C >= 0, and the
    mirrored formula for C < 0.  A and B may be complex; C is an integer.
    """
    mp = ctx.mp
    t = ctx.convert(t)
    C = int(C)
    if C >= 0:
        pref = mp.power(t, mp.mpf(C) / 2) * _binom_poly(ctx.convert(B) + C - 1, C, ctx)
        return pref * gauss_2f1(A, ctx.convert(B) + C, C + 1, t, ctx)
    c = -C
    pref = mp.power(t, mp.mpf(c) / 2) * _binom_poly(ctx.convert(A) + c - 1, c, ctx)
    return pref * gauss_2f1(B, ctx.convert(A) + c, c + 1, t, ctx)


# ---------------------------------------------------------------------------
# Eulerian numbers


@functools.lru_cache(maxsize=None)
def eulerian_row(c: int) -> tuple[int, ...]:
    """Row (E(c,0),...,E(c,c-1)) of the Eulerian triangle; row sum is c!."""
    if c < 1:
        raise ValueError("c must be >= 1")
    row = (1,)
    for n in range(2, c + 1):
        prev = row
        row = tuple(
            (m + 1) * (prev[m] if m < len(prev) else 0)
            + (n - m) * (prev[m - 1] if 0 <= m - 1 < len(prev) else 0)
            for m in range(n)
        )
    return row


class EulerianTable:
    """E(c,l) for 0 <= l < c <= c_max, arbitrary-size integers."""

    def __init__(self, c_max: int):
        self.c_max = c_max
        self.rows = {c: eulerian_row(c) for c in range(1, c_max + 1)}

    def __call__(self, c: int, l: int) -> int:
        return self.rows[c][l]


# ---------------------------------------------------------------------------
# Stieltjes constants


class StieltjesTable:
    """gamma_0..gamma_n at context precision, gamma_0 = Euler's constant."""

    def __init__(self, values, ctx: PrecisionContext):
        self.values = list(values)
        self.ctx = ctx

    def __getitem__(self, n: int):
        return self.values[n]

    def __len__(self):
        return len(self.values)


def stieltjes(n_max: int, ctx: PrecisionContext) -> StieltjesTable:
    """gamma_0..gamma_{n_max} via Euler-Maclaurin on sum log(k)^n/k.

    Computed jointly from the jet of sum_{j<=m} j^{-1-h}: the regular part
    of zeta(1+h) has Taylor coefficients (-1)^n gamma_n / n!.  Values are
    validated against independent references for n <= 20; larger n (needed
    for Laurent evaluation near the pole at elevated precision) come from
    the same formula.
    """
    mp = ctx.mp
    order = n_max + 1
    digits = ctx.effective_digits
    m = max(40, int(digits * 1.4) + 2 * n_max)
    # sum_{j=1}^{m} j^{-1-h} as a jet in h
    tot = [mp.mpf(0)] * order
    for j in range(1, m + 1):
        lj = mp.log(j)
        inv = mp.mpf(1) / j
        term = inv
        tot[0] += term
        for i in range(1, order):
            term = term * (-lj) / i
            tot[i] += term
    # + (m^{-h} - 1)/h  (regular jet)
    lm = mp.log(m)
    for i in range(order):
        # coefficient of h^i in (exp(-h lm) - 1)/h = (-lm)^{i+1}/(i+1)!
        tot[i] += (-lm) ** (i + 1) / mp.factorial(i + 1)
    # - m^{-1-h}/2
    inv = mp.mpf(1) / m
    term = inv
    tot[0] -= term / 2
    for i in range(1, order):
        term = term * (-lm)
        tot[i] -= term / (2 * mp.factorial(i))
    # Bernoulli corrections: -sum_q B_{2q}/(2q)! f^{(2q-1)}(m),
    # f(x) = x^{-1-h}; f^{(r)}(x) = (-1)^r (1+h)_r x^{-1-h-r}
    target = mp.mpf(10) ** (-(digits + 5))
    q = 1
    while True:
        r = 2 * q - 1
        B = mp.mpf(mpmath.bernoulli(2 * q))
        # pochhammer (1+h)_r as jet
        poch = [mp.mpf(1)] + [mp.mpf(0)] * (order - 1)
        for i in range(r):
            poch = ps_mul(poch, [mp.mpf(1 + i), mp.mpf(1)], order)
        scale = mp.power(m, -1 - r)
        ejet = ps_exp_linear(-lm, order, mp.mpf(1))
        fjet = ps_mul(poch, [c * scale for c in ejet], order)
        coef = B / mp.factorial(2 * q) * (-1) ** r
        bound = abs(coef) * max(abs(c) for c in fjet)
        for i in range(order):
            tot[i] -= coef * fjet[i]
        if bound < target:
            break
        q += 1
        if q > 4 * digits:
            raise PrecisionExceeded("stieltjes Euler-Maclaurin tail stalled")
    values = [(-1) ** n * tot[n] * mp.factorial(n) for n in range(order)]
    return StieltjesTable(values, ctx)


def zeta_plus_one_series(order: int, table: StieltjesTable, ctx: PrecisionContext):
    """Taylor coefficients of s*zeta(1+s): [1, g0, -g1, g2/2!, -g3/3!, ...]."""
    mp = ctx.mp
    out = [mp.mpf(1)]
    for n in range(order - 1):
        out.append((-1) ** n * table[n] / mp.factorial(n))
    return out


# ---------------------------------------------------------------------------
# zeta on the critical line (Euler-Maclaurin)


def zeta_critical_line(t, ctx: PrecisionContext):
    """zeta(1/2 + it) for t >= 0 to at least effective_digits-5 digits.

    Euler-Maclaurin with N = max(20, ceil(3t)) main terms; Bernoulli
    corrections are added until the standard remainder bound
    |R_J| <= |B_{2J+2}/(2J+2)! (s)_{2J+1} N^{-s-2J-1}| * |s+2J+1|/(sigma+2J+1)
    drops below target.
    """
    mp = ctx.mp
    t = mp.mpf(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t > 10 ** 6:
        raise ValueError("t above desk-scale guard 10^6")
    s = mp.mpc(mp.mpf(1) / 2, t)
    N = max(20, int(mp.ceil(3 * t)))
    total = mp.mpc(0)
    for n in range(1, N):
        total += mp.power(n, -s)
    total += mp.power(N, 1 - s) / (s - 1)
    total += mp.power(N, -s) / 2
    target = mp.mpf(10) ** (-(ctx.effective_digits + 3)) * max(abs(total), mp.mpf(1))
    poch = s  # (s)_{2j-1} built incrementally
    npow = mp.power(N, -s - 1)
    invN2 = mp.mpf(1) / (N * N)
    j = 1
    prev_bound = mp.inf
    while True:
        B = mp.mpf(mpmath.bernoulli(2 * j))
        term = B / mp.factorial(2 * j) * poch * npow
        total += term
        # remainder bound after including term j
        poch_next = poch * (s + 2 * j - 1) * (s + 2 * j)
        npow_next = npow * invN2
        Bn = mp.mpf(mpmath.bernoulli(2 * j + 2))
        bound = abs(Bn / mp.factorial(2 * j + 2) * poch_next * npow_next) * (
            abs(s + 2 * j + 1) / (s.real + 2 * j + 1)
        )
        if bound < target:
            break
        if bound > prev_bound * 4:
            raise PrecisionExceeded(
                "Euler-Maclaurin tail bound diverging; raise N or lower target"
            )
        prev_bound = bound
        poch = poch_next
        npow = npow_next
        j += 1
        if j > 40 * ctx.effective_digits:
            raise PrecisionExceeded("zeta_critical_line correction terms exhausted")
    return total


# ---------------------------------------------------------------------------
# zeta derivatives on the real axis and prime log-power sums


@functools.lru_cache(maxsize=None)
def _zeta_jet_cached(x_key: str, order: int, digits: int):
    """Taylor coefficients of zeta(x+h) in h, order terms, at `digits`."""
    ctx = PrecisionContext(max(15, digits - 10), 10)
    mp = ctx.mp
    x = mp.mpf(x_key)
    N = max(30, digits // 2 + order)
    tot = [mp.mpf(0)] * order
    for n in range(1, N):
        ln = mp.log(n)
        term = mp.power(n, -x)
        tot[0] += term
        for i in range(1, order):
            term = term * (-ln) / i
            tot[i] += term
    lnN = mp.log(N)
    ejet = ps_exp_linear(-lnN, order, mp.mpf(1))
    # N^{1-x} e^{-h lnN} / (x-1+h)
    c0 = mp.mpf(1) / (x - 1)
    invj = []
    cur = c0
    for _ in range(order):
        invj.append(cur)
        cur = -cur * c0
    scale = mp.power(N, 1 - x)
    piece = ps_mul([c * scale for c in ejet], invj, order)
    for i in range(order):
        tot[i] += piece[i]
    scale = mp.power(N, -x) / 2
    for i in range(order):
        tot[i] += scale * ejet[i]
    target = mp.mpf(10) ** (-(digits + 5))
    poch = [mp.mpf(1)] + [mp.mpf(0)] * (order - 1)
    q = 1
    while True:
        # poch for (s)_{2q-1} = (x+h)(x+1+h)...(x+2q-2+h)
        for i in (2 * q - 3, 2 * q - 2) if q > 1 else (0,):
            poch = ps_mul(poch, [x + i, mp.mpf(1)], order)
        B = mp.mpf(mpmath.bernoulli(2 * q))
        scale = mp.power(N, -x - 2 * q + 1)
        piece = ps_mul(poch, [c * scale for c in ejet], order)
        coef = B / mp.factorial(2 * q)
        bound = abs(coef) * max(abs(c) for c in piece)
        for i in range(order):
            tot[i] += coef * piece[i]
        if bound < target:
            break
        q += 1
        if q > 4 * digits:
            raise PrecisionExceeded("zeta jet Euler-Maclaurin stalled")
    return tuple(tot)


def zeta_derivatives(x, r: int, ctx: PrecisionContext):
    """[zeta(x), zeta'(x), ..., zeta^(r)(x)] for real x > 1."""
    mp = ctx.mp
    jet = _zeta_jet_cached(mp.nstr(mp.mpf(x), ctx.effective_digits + 5),
                           r + 1, ctx.effective_digits)
    return [mp.mpf(jet[j]) * mp.factorial(j) for j in range(r + 1)]


def log_zeta_derivative(r: int, s, ctx: PrecisionContext):
    """r-th derivative of log zeta at real s > 1.

    When the von Mangoldt Dirichlet series
    (log zeta)^(r)(s) = (-1)^r sum Lambda(n) log(n)^(r-1) n^-s   (r >= 1)
    reaches context precision with a modest number of terms it is summed
    directly (r = 0 via the Euler product over the first primes).  At small
    s that series cannot reach the precision target and the Euler-Maclaurin
    jet of zeta is logged instead.
    """
    mp = ctx.mp
    s = mp.mpf(s)
    if s <= 1:
        raise ValueError("s must be > 1")
    # terms decay like (n/2)^{-s} relative to the leading n = 2 term
    n_needed = 2.0 * 10 ** (ctx.effective_digits / float(s))
    if n_needed > 400:
        jet = _zeta_jet_cached(mp.nstr(s, ctx.effective_digits + 5),
                               r + 1, ctx.effective_digits)
        lg = ps_log(list(jet), r + 1, mp)
        return lg[r] * mp.factorial(r)
    n_max = int(n_needed) + 4
    eps = ctx.eps
    if r == 0:
        total = mp.mpf(0)
        for p in _cached_primes(n_max):
            term = -mp.log(1 - mp.power(p, -s))
            total += term
            if abs(term) < eps * abs(total):
                break
        return total
    total = mp.mpf(0)
    support = von_mangoldt_support(n_max)
    for n in sorted(support):
        lam = mp.log(support[n])
        term = lam * mp.log(n) ** (r - 1) * mp.power(n, -s)
        total += term
        if total != 0 and abs(term) < eps * abs(total) and n > 4:
            break
    return (-1) ** r * total


def prime_zeta_log(r: int, s, ctx: PrecisionContext):
    """sum over primes of log(p)^r / p^s for real s > 1, via Moebius
    inversion: (-1)^r sum_m mu(m) m^{r-1} (log zeta)^(r)(m s)."""
    mp = ctx.mp
    s = mp.mpf(s)
    if s <= 1:
        raise ValueError("s must be > 1")
    eps = ctx.eps
    total = mp.mpf(0)
    m = 1
    while True:
        mu = mobius(m)
        if mu != 0:
            term = mu * mp.mpf(m) ** (r - 1) * log_zeta_derivative(r, m * s, ctx)
            total += term
            if m > 2 and total != 0 and abs(term) < eps * abs(total):
                break
        m += 1
        if m * s > 2000:
            break
    return (-1) ** r * total
