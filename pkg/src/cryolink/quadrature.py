"""Adaptive Simpson quadrature and a fixed-step trapezoid reference."""

from __future__ import annotations

from typing import Callable

import numpy as np


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = 1e-6,
    max_depth: int = 20,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson's rule.

    The absolute tolerance is ``rtol`` times a coarse estimate of the whole
    integral; each accepted panel gets the Richardson correction
    ``(S2 - S1)/15``.  Panels are never split beyond ``max_depth`` levels.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # Floor keeps a zero integrand from demanding an exact-zero error.
    tol = rtol * max(abs(whole), np.finfo(float).tiny)

    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return sign * total


def trapezoid_fixed(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int = 100_000) -> float:
    """Composite trapezoid rule with ``n`` uniform steps; ``f`` must be vectorized."""
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))
