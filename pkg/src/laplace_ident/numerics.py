"""Small numerical kernels: bisection, polynomial root isolation, adaptive Simpson.

Polynomial coefficient arrays are in ascending order (``c[0] + c[1] x + ...``),
the numpy.polynomial.polynomial convention.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P


def bisect(func: Callable[[float], float], lo: float, hi: float,
           xtol: float = 0.0, max_iter: int = 200) -> float:
    """Root of ``func`` on ``[lo, hi]`` given a sign change at the endpoints.

    Iterates until the bracket stops shrinking in floating point (or is
    narrower than ``xtol``); the endpoint with the smaller residual is returned.
    """
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return lo if abs(flo) <= abs(fhi) else hi


def trim(c) -> np.ndarray:
    """Drop exactly-zero leading (highest-degree) coefficients."""
    c = np.asarray(c, dtype=float)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1]


def cauchy_bound(c) -> float:
    """Upper bound on the modulus of every root of the polynomial ``c``."""
    c = trim(c)
    if c.size <= 1:
        return 0.0
    return 1.0 + float(np.max(np.abs(c[:-1]))) / abs(c[-1])


def real_roots(c, lo: float, hi: float) -> list[float]:
    """All real roots of polynomial ``c`` in the closed interval ``[lo, hi]``.

    Roots are isolated recursively: the roots of ``c'`` split ``[lo, hi]``
    into segments where ``c`` is monotone, and each segment holding a sign
    change is bisected. A critical point where ``c`` vanishes to rounding is a
    multiple root and is reported once.
    """
    c = trim(c)
    deg = c.size - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[0] / c[1]
        return [float(r)] if lo <= r <= hi else []
    crit = real_roots(P.polyder(c), lo, hi)
    pts = [lo] + [x for x in crit if lo < x < hi] + [hi]
    scale = float(np.max(np.abs(c)))
    roots: list[float] = []

    def f(x: float) -> float:
        return float(P.polyval(x, c))

    def near_zero(x: float) -> bool:
        mag = float(np.sum(np.abs(c) * np.abs(x) ** np.arange(c.size)))
        return abs(f(x)) <= 64 * np.finfo(float).eps * max(mag, scale * 1e-300)

    for x in pts:
        if near_zero(x):
            roots.append(x)
    for a, b in zip(pts[:-1], pts[1:]):
        fa, fb = f(a), f(b)
        if near_zero(a) or near_zero(b):
            continue
        if (fa > 0) != (fb > 0):
            roots.append(bisect(f, a, b))
    roots.sort()
    out: list[float] = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-12 * max(1.0, abs(r)):
            out.append(r)
    return out


def _simpson(h, fa, fm, fb):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                     tol: float = 1e-10, initial_panels: int = 16,
                     max_level: int = 48, max_panels: int = 1 << 18) -> float:
    """Integrate a vectorized ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Classic adaptive Simpson with Richardson correction, run breadth-first so
    each refinement level is a single vectorized call. Panel tolerances are
    split in proportion to width. A panel whose error estimate is already at
    the rounding level of its own value stops refining, since a tolerance
    below that cannot be met; ``max_panels`` bounds the live panel count.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, initial_panels, max_level)
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    flo, fmid, fhi = f(lo), f(mid), f(hi)
    whole = _simpson(hi - lo, flo, fmid, fhi)
    ptol = np.full(lo.shape, tol / initial_panels)
    parts: list[float] = []
    for level in range(max_level):
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = _simpson(mid - lo, flo, flm, fmid)
        right = _simpson(hi - mid, fmid, frm, fhi)
        err = left + right - whole
        floor = 64 * np.finfo(float).eps * (np.abs(left) + np.abs(right))
        done = (np.abs(err) <= 15.0 * ptol) | (np.abs(err) <= floor)
        if level == max_level - 1 or 2 * np.count_nonzero(~done) > max_panels or np.all((mid - lo) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
            done[:] = True
        parts.extend((left + right + err / 15.0)[done].tolist())
        keep = ~done
        if not keep.any():
            break
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        mid = np.concatenate([lm[keep], rm[keep]])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        half = ptol[keep] / 2.0
        ptol = np.concatenate([half, half])
    return math.fsum(parts)
