"""Double-double (about 32 significant digits) dense LU with partial pivoting.

A value is carried as an unevaluated pair ``hi + lo`` with ``|lo| <= ulp(hi)/2``.
Only the handful of operations needed by the RBF solver are provided; all
run under numba with the GIL released.
"""
from __future__ import annotations

import math

import numba
import numpy as np

from .kernels import phi

_SPLITTER = 134217729.0  # 2**27 + 1


@numba.njit(inline="always")
def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@numba.njit(inline="always")
def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@numba.njit(inline="always")
def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@numba.njit(inline="always")
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = two_sum(s, e)
    e += f
    return two_sum(s, e)


@numba.njit(inline="always")
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return two_sum(p, e)


@numba.njit(inline="always")
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = dd_mul(q1, 0.0, bh, bl)
    rh, rl = dd_add(ah, al, -ph, -pl)
    q2 = rh / bh
    ph, pl = dd_mul(q2, 0.0, bh, bl)
    rh, rl = dd_add(rh, rl, -ph, -pl)
    q3 = rh / bh
    qh, ql = two_sum(q1, q2)
    return dd_add(qh, ql, q3, 0.0)


@numba.njit(cache=True, nogil=True)
def lu_factor_dd(a):
    """Factor ``P a = L U`` in place on hi/lo copies of ``a``.

    Returns (hi, lo, perm, ok). ``ok`` is False when an exactly zero pivot
    column is met; the factors are then incomplete.
    """
    n = a.shape[0]
    hi = a.copy()
    lo = np.zeros_like(a)
    perm = np.arange(n)
    for k in range(n):
        p = k
        best = abs(hi[k, k])
        for i in range(k + 1, n):
            if abs(hi[i, k]) > best:
                best = abs(hi[i, k])
                p = i
        if best == 0.0:
            return hi, lo, perm, False
        if p != k:
            for j in range(n):
                t = hi[k, j]
                hi[k, j] = hi[p, j]
                hi[p, j] = t
                t = lo[k, j]
                lo[k, j] = lo[p, j]
                lo[p, j] = t
            t2 = perm[k]
            perm[k] = perm[p]
            perm[p] = t2
        ph, pl = hi[k, k], lo[k, k]
        for i in range(k + 1, n):
            fh, fl = dd_div(hi[i, k], lo[i, k], ph, pl)
            hi[i, k] = fh
            lo[i, k] = fl
            if fh == 0.0:
                continue
            for j in range(k + 1, n):
                mh, ml = dd_mul(fh, fl, hi[k, j], lo[k, j])
                hi[i, j], lo[i, j] = dd_add(hi[i, j], lo[i, j], -mh, -ml)
    return hi, lo, perm, True


@numba.njit(cache=True, nogil=True)
def lu_solve_dd(hi, lo, perm, b):
    n = b.shape[0]
    yh = np.empty(n)
    yl = np.zeros(n)
    for i in range(n):
        yh[i] = b[perm[i]]
    for i in range(n):
        sh, sl = yh[i], yl[i]
        for j in range(i):
            mh, ml = dd_mul(hi[i, j], lo[i, j], yh[j], yl[j])
            sh, sl = dd_add(sh, sl, -mh, -ml)
        yh[i], yl[i] = sh, sl
    for i in range(n - 1, -1, -1):
        sh, sl = yh[i], yl[i]
        for j in range(i + 1, n):
            mh, ml = dd_mul(hi[i, j], lo[i, j], yh[j], yl[j])
            sh, sl = dd_add(sh, sl, -mh, -ml)
        yh[i], yl[i] = dd_div(sh, sl, hi[i, i], lo[i, i])
    return yh, yl


@numba.njit(cache=True, nogil=True)
def kernel_matrix(xy, code, eps):
    n = xy.shape[0]
    out = np.empty((n, n))
    d0 = phi(code, eps, 0.0)
    for i in range(n):
        out[i, i] = d0
        for j in range(i + 1, n):
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            v = phi(code, eps, math.sqrt(dx * dx + dy * dy))
            out[i, j] = v
            out[j, i] = v
    return out


@numba.njit(cache=True, nogil=True)
def expand(centers, w_hi, w_lo, queries, code, eps):
    """sum_j w_j * phi(|q - c_j|) for every query, accumulated in double-double.

    Kernel values are the same doubles :func:`kernel_matrix` produces. Each output depends only on its own query, so batching and ordering
    never change a result.
    """
    m = queries.shape[0]
    n = centers.shape[0]
    out = np.empty(m)
    for i in range(m):
        sh, sl = 0.0, 0.0
        qx, qy = queries[i, 0], queries[i, 1]
        for j in range(n):
            dx = centers[j, 0] - qx
            dy = centers[j, 1] - qy
            f = phi(code, eps, math.sqrt(dx * dx + dy * dy))
            ph, pl = two_prod(f, w_hi[j])
            sh, sl = dd_add(sh, sl, ph, pl + f * w_lo[j])
        out[i] = sh + sl
    return out


@numba.njit(cache=True, nogil=True)
def residual_dd(a, w_hi, w_lo, b):
    """a @ w - b with a double-double accumulator, rounded to double."""
    n = b.shape[0]
    out = np.empty(n)
    for i in range(n):
        sh, sl = -b[i], 0.0
        for j in range(a.shape[1]):
            ph, pl = two_prod(a[i, j], w_hi[j])
            sh, sl = dd_add(sh, sl, ph, pl + a[i, j] * w_lo[j])
        out[i] = sh + sl
    return out
