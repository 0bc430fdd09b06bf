"""Vectorised double-double arithmetic (about 32 significant digits).

Only the handful of operations needed by the Taylor-series path of the
Mittag-Leffler evaluator are provided.  Values are carried as ``(hi, lo)``
pairs of float64 arrays with ``|lo| <= ulp(hi) / 2``.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    s = a + b
    err = b - (s - a)
    return s, err


def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def mul_d(ah, al, b, b_split=None):
    """(ah, al) * b with b a plain float64 array (optionally pre-split)."""
    p = ah * b
    h1, l1 = split(ah)
    h2, l2 = split(b) if b_split is None else b_split
    e = ((h1 * h2 - p) + h1 * l2 + l1 * h2) + l1 * l2
    e = e + al * b
    return quick_two_sum(p, e)


def complex_horner(coef_hi, coef_lo, zr, zi):
    """Evaluate ``sum_k c_k z**k`` for real double-double ``c_k``.

    ``zr``/``zi`` are float64 arrays; the result is returned as a complex128
    array after rounding the double-double accumulators.
    """
    n = len(coef_hi)
    shape = np.shape(zr)
    rh = np.full(shape, coef_hi[n - 1])
    rl = np.full(shape, coef_lo[n - 1])
    ih = np.zeros(shape)
    il = np.zeros(shape)
    zr_s = split(zr)
    zi_s = split(zi)
    for k in range(n - 2, -1, -1):
        # (r + i*m) * (zr + i*zi) + c_k
        a_h, a_l = mul_d(rh, rl, zr, zr_s)
        b_h, b_l = mul_d(ih, il, zi, zi_s)
        c_h, c_l = mul_d(rh, rl, zi, zi_s)
        d_h, d_l = mul_d(ih, il, zr, zr_s)
        nr_h, nr_l = add(a_h, a_l, -b_h, -b_l)
        ni_h, ni_l = add(c_h, c_l, d_h, d_l)
        rh, rl = add(nr_h, nr_l, coef_hi[k], coef_lo[k])
        ih, il = ni_h, ni_l
    return (rh + rl) + 1j * (ih + il)
