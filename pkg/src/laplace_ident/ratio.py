"""The ratio ``H_{n,m}(p, lam) = L[p^n](lam) / L[p^m](lam)`` and H-equality tests.

Two functions have the same ratio iff the cross-difference
``W = L[p^n] L[q^m] - L[p^m] L[q^n]`` vanishes identically. ``W`` is a sum
of delayed rationals, and exponentials with distinct delays are linearly
independent over rational functions, so ``W == 0`` iff every delay group
vanishes on its own. That is the exact path; a grid evaluation of ``W`` is
the numeric path, and a convolution residual is an independent oracle.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import AssumptionViolated, DivisionByZero, NonVanishingHead
from .fnmodel import SIG_TOL, PiecewiseExpPoly, power
from .laplace import DEFAULT_MARGIN, TransformExpr, difference_residuals, eval_transform, transform
from .numerics import adaptive_simpson

EQUAL, UNEQUAL, INDETERMINATE = "equal", "unequal", "indeterminate"
DEFAULT_TOL = 1e-9
GRID_POINTS = 64
GRID_SPAN = (1.0, 60.0)
TINY = 1e-300


def default_tol() -> float:
    """Tolerance from ``LAPLACE_IDENT_TOL`` if set, else 1e-9."""
    raw = os.environ.get("LAPLACE_IDENT_TOL")
    return float(raw) if raw else DEFAULT_TOL


@dataclass(frozen=True)
class AssumptionReport:
    a1_ok: bool
    a2_ok: bool
    a3_ok: bool
    details: tuple = ()

    @property
    def ok(self) -> bool:
        return self.a1_ok and self.a2_ok and self.a3_ok


def assumptions_check(p: PiecewiseExpPoly, n: int, m: int) -> AssumptionReport:
    """Check p is not identically zero near 0, gcd(n, m) = 1 and n > m."""
    details = []
    a1 = bool(p.pieces[0].terms)
    if not a1:
        where = p.pieces[1].start if len(p.pieces) > 1 else math.inf
        details.append(f"assumption 1: p vanishes on [0, {where:g}); the shifted tail has the same ratio")
    a2 = gcd(n, m) == 1
    if not a2:
        details.append(f"assumption 2: n={n} and m={m} share the factor {gcd(n, m)}")
    a3 = n > m
    if not a3:
        details.append(f"assumption 3: need n > m, got n={n}, m={m}")
    return AssumptionReport(a1, a2, a3, tuple(details))


def _floor(sigma: float) -> float:
    return 0.0 if sigma == -math.inf else sigma


class PowerTransforms:
    """Memoized ``transform(p**k)``."""

    def __init__(self, p: PiecewiseExpPoly):
        self.p = p
        self._cache: dict[int, TransformExpr] = {}

    def __getitem__(self, k: int) -> TransformExpr:
        if k not in self._cache:
            self._cache[k] = transform(power(self.p, k))
        return self._cache[k]


def ratio_H(p: PiecewiseExpPoly, n: int, m: int, lam: float,
            margin: float = DEFAULT_MARGIN) -> float:
    pt = PowerTransforms(p)
    den = eval_transform(pt[m], lam, margin)
    num = eval_transform(pt[n], lam, margin)
    if abs(den) < TINY:
        raise DivisionByZero(f"L[p^{m}]({lam}) = {den!r}")
    return num / den


@dataclass(frozen=True)
class EqualityReport:
    verdict: str
    max_grid_residual: float
    exact_residuals: dict = field(default_factory=dict)
    witness_lambda: Optional[float] = None
    grid: tuple = ()          # (lam, relative residual) pairs, sorted by lam
    conv_residuals: tuple = ()  # (x, residual) pairs when the oracle ran

    @property
    def max_exact_residual(self) -> float:
        return max(self.exact_residuals.values(), default=0.0)


def cross_difference(p: PiecewiseExpPoly, q: PiecewiseExpPoly, n: int, m: int):
    """``(L[p^n] L[q^m], L[p^m] L[q^n])`` as transform expressions."""
    P, Q = PowerTransforms(p), PowerTransforms(q)
    return P[n] * Q[m], P[m] * Q[n]


def h_equal(p: PiecewiseExpPoly, q: PiecewiseExpPoly, n: int, m: int,
            tol: Optional[float] = None, check_assumptions: bool = True,
            grid_points: int = GRID_POINTS) -> EqualityReport:
    """Decide ``H_{n,m}(p, .) == H_{n,m}(q, .)`` by exact and numeric paths.

    ``equal`` needs both paths within ``tol``; ``unequal`` needs both to fail;
    a disagreement is reported as ``indeterminate``.
    """
    tol = default_tol() if tol is None else tol
    if check_assumptions:
        for f in (p, q):
            rep = assumptions_check(f, n, m)
            if not rep.ok:
                raise AssumptionViolated(rep)
    left, right = cross_difference(p, q, n, m)
    W = left - right
    exact = difference_residuals(left, right)
    exact_ok = all(r <= tol for r in exact.values())

    base = _floor(W.sigma)
    lams = np.linspace(base + GRID_SPAN[0], base + GRID_SPAN[1], grid_points)
    grid = []
    for lam in lams:
        a = math.fsum(at(lam) for at in left.atoms)
        b = math.fsum(at(lam) for at in right.atoms)
        # relative to the evaluation scale: the sums can be far smaller than their parts,
        # and near the abscissa the numerators themselves cancel
        denom = math.fsum(at.magnitude(lam) for at in left.atoms + right.atoms)
        grid.append((float(lam), abs(a - b) / denom if denom > TINY else 0.0))
    worst = max(grid, key=lambda g: g[1])
    numeric_ok = worst[1] <= tol
    if exact_ok and numeric_ok:
        verdict = EQUAL
    elif not exact_ok and not numeric_ok:
        verdict = UNEQUAL
    else:
        verdict = INDETERMINATE
    witness = None if verdict == EQUAL else worst[0]
    return EqualityReport(verdict, worst[1], exact, witness, tuple(grid))


def convolve_at(f: PiecewiseExpPoly, g: PiecewiseExpPoly, x: float, tol: float = 1e-12) -> float:
    """``(f * g)(x) = int_0^x f(s) g(x - s) ds`` by adaptive Simpson."""
    if x <= 0:
        return 0.0
    cuts = {0.0, x}
    cuts.update(s for s in f.starts if 0 < s < x)
    cuts.update(x - s for s in g.starts if 0 < x - s < x)
    cuts = sorted(cuts)
    share = tol / max(len(cuts) - 1, 1)

    def integrand(s):
        return f(s) * g(np.maximum(x - s, 0.0))

    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a > SIG_TOL:
            # nudge off the breakpoints so each panel sees a single pair of pieces
            eps = 1e-15 * max(1.0, abs(b))
            total += adaptive_simpson(lambda s: integrand(np.clip(s, a + eps, b - eps)), a, b, share)
    return total


def conv_residual(p: PiecewiseExpPoly, q: PiecewiseExpPoly, n: int, m: int,
                  xs: Sequence[float], tol: float = 1e-12) -> list[float]:
    """``(p^n * q^m)(x) - (p^m * q^n)(x)`` for each ``x``."""
    pn, pm, qn, qm = power(p, n), power(p, m), power(q, n), power(q, m)
    return [convolve_at(pn, qm, x, tol) - convolve_at(pm, qn, x, tol) for x in xs]


@dataclass(frozen=True)
class XiCheck:
    max_relative_residual: float
    decreasing: bool
    rows: tuple  # (lam, xi, rhs, scaled = |xi| e^{lam T})


def xi_check(F: PiecewiseExpPoly, G: PiecewiseExpPoly, H: PiecewiseExpPoly, T: float,
             n: int, m: int, lams: Sequence[float], dps: int = 60) -> XiCheck:
    """Compare both sides of the concatenation identity for ``xi``.

    ``xi = L[F^m](L[G^n] - L[H^n]) - L[F^n](L[G^m] - L[H^m])`` must equal
    ``exp(-lam T)(L[H^n] L[G^m] - L[G^n] L[H^m])`` when the concatenations
    ``F + G(.-T)`` and ``F + H(.-T)`` share a ratio. Both sides are evaluated
    from the closed forms in ``dps``-digit arithmetic, because ``xi`` is a
    difference of terms many orders of magnitude larger than itself.
    """
    for a, b, terms in F.bounds():
        if b > T + SIG_TOL and terms:
            raise NonVanishingHead(f"F is nonzero on [{max(a, T)}, {b})")
    Ft, Gt, Ht = PowerTransforms(F), PowerTransforms(G), PowerTransforms(H)
    rows = []
    worst = 0.0
    with mpmath.workdps(dps):
        for lam in sorted(lams):
            ev = {}
            for name, src in (("F", Ft), ("G", Gt), ("H", Ht)):
                for k in (n, m):
                    ev[name, k] = eval_transform(src[k], lam, dps=dps)
            xi = ev["F", m] * (ev["G", n] - ev["H", n]) - ev["F", n] * (ev["G", m] - ev["H", m])
            rhs = mpmath.exp(-mpmath.mpf(lam) * T) * (ev["H", n] * ev["G", m] - ev["G", n] * ev["H", m])
            big = max(abs(xi), abs(rhs))
            rel = float(abs(xi - rhs) / big) if big > 0 else 0.0
            worst = max(worst, rel)
            scaled = abs(xi) * mpmath.exp(mpmath.mpf(lam) * T)
            rows.append((float(lam), float(xi), float(rhs), float(scaled)))
    scaled = [r[3] for r in rows]
    decreasing = all(b < a for a, b in zip(scaled[:-1], scaled[1:])) if any(scaled) else True
    return XiCheck(worst, decreasing, tuple(rows))
