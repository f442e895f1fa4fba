"""Truncated one-variable power series over mpmath numbers.

Plain lists of coefficients, constant term first, all of a fixed order.
Used for Taylor jets of zeta and for per-variable expansions of local
factors.  Not a general series library: only what the callers need.
"""

from __future__ import annotations


def ps_mul(a, b, order):
    """Product truncated to `order` coefficients."""
    zero = a[0] * 0
    out = [zero] * order
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        top = min(order - i, len(b))
        for j in range(top):
            bj = b[j]
            if bj != 0:
                out[i + j] += ai * bj
    return out


def ps_exp_linear(c, order, one):
    """Series of exp(c*h): [1, c, c^2/2!, ...] with `order` coefficients."""
    out = [one]
    term = one
    for j in range(1, order):
        term = term * c / j
        out.append(term)
    return out


def ps_exp(a, order):
    """exp of a series with zero constant term.

    Uses the derivative recurrence w*e_w = sum_{j>=1} j*a_j*e_{w-j}.
    """
    if a[0] != 0:
        raise ValueError("ps_exp needs zero constant term")
    one = a[0] * 0 + 1
    e = [one] + [a[0] * 0] * (order - 1)
    for w in range(1, order):
        s = e[0] * 0
        for j in range(1, min(w, len(a) - 1) + 1):
            if a[j] != 0:
                s += j * a[j] * e[w - j]
        e[w] = s / w
    return e


def ps_log(a, order, mp):
    """log of a series with nonzero constant term; includes log(a_0).

    `mp` is the mpmath context used for log(a_0).
    Recurrence: w*a_0*l_w = w*a_w - sum_{j=1}^{w-1} j*l_j*a_{w-j}.
    """
    a0 = a[0]
    if a0 == 0:
        raise ValueError("ps_log needs nonzero constant term")
    zero = a0 * 0
    out = [mp.log(a0)] + [zero] * (order - 1)
    for w in range(1, order):
        s = w * (a[w] if w < len(a) else zero)
        for j in range(1, w):
            aj = a[w - j] if (w - j) < len(a) else zero
            if aj != 0 and out[j] != 0:
                s -= j * out[j] * aj
        out[w] = s / (w * a0)
    return out


def ps_inv(a, order):
    """Reciprocal of a series with nonzero constant term."""
    a0 = a[0]
    zero = a0 * 0
    inv0 = 1 / a0
    out = [inv0] + [zero] * (order - 1)
    for w in range(1, order):
        s = zero
        for j in range(1, min(w, len(a) - 1) + 1):
            if a[j] != 0:
                s += a[j] * out[w - j]
        out[w] = -inv0 * s
    return out
