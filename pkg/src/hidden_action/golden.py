"""Bracketed golden-section maximization, scalar or elementwise over arrays."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, tol=1e-8, max_iter=200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    ``lo`` and ``hi`` may be arrays of equal shape, in which case ``f`` must
    evaluate elementwise and every bracket is shrunk in lockstep. The endpoints
    are compared against the interior optimum at the end so that boundary
    maxima are returned exactly.

    Returns ``(argmax, max)``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if np.any(hi < lo):
        raise ValueError("empty bracket: hi < lo")
    a, b = lo.copy(), hi.copy()
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = f1 >= f2
        # maximum lies in [a, x2] where left, else in [x1, b]
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        new_x = np.where(left, b - INV_PHI * (b - a), a + INV_PHI * (b - a))
        f_new = f(new_x)
        x1, x2 = np.where(left, new_x, x2), np.where(left, x1, new_x)
        f1, f2 = np.where(left, f_new, f2), np.where(left, f1, f_new)
    xm = 0.5 * (a + b)
    fm = f(xm)
    f_lo, f_hi = f(lo), f(hi)
    best_x = np.where(f_lo > fm, lo, xm)
    best_f = np.maximum(f_lo, fm)
    best_x = np.where(f_hi > best_f, hi, best_x)
    best_f = np.maximum(f_hi, best_f)
    if best_x.ndim == 0:
        return float(best_x), float(best_f)
    return best_x, best_f
