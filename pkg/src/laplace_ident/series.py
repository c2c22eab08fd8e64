"""Power-series obstruction coefficients for concatenated functions.

For ``p = F + G(.-T) 1_[T,inf)`` and ``q = F + H(.-T) 1_[T,inf)`` with Taylor
coefficients ``a_i``, ``b_i``, ``c_i`` of ``F``, ``G``, ``H`` at 0, the
coefficients of the k-th powers are k-fold Cauchy products ``A_{k,i}``,
``B_{k,i}``, ``C_{k,i}``, and

    d_i = sum_j (A_{m,j}(B_{n,i-j} - C_{n,i-j}) - A_{n,j}(B_{m,i-j} - C_{m,i-j})) j! (i-j)!

must vanish for every ``i`` whenever ``p`` and ``q`` share the ratio ``H_{n,m}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

from .errors import IdenticalFunctions
from .fnmodel import PiecewiseExpPoly, PowerSeries, first_divergence, tail_at, taylor_at_zero

DEFAULT_ORDER = 8
D_TOL = 1e-8
ONE, ZERO = "one", "zero"


def power_coeffs(s: PowerSeries, k: int) -> PowerSeries:
    """Truncated ``k``-fold Cauchy product of ``s`` with itself."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    N = s.order
    acc = list(s.coeffs)
    for _ in range(k - 1):
        acc = [math.fsum(acc[j] * s.coeffs[i - j] for j in range(i + 1)) for i in range(N + 1)]
    return PowerSeries(acc)


@dataclass(frozen=True)
class ObstructionLedger:
    A: dict  # (k, i) -> coefficient of t^i in F^k
    B: dict
    C: dict
    d: tuple
    scales: tuple  # largest intermediate product magnitude behind each d_i, floored at 1 + max coefficient
    n: int
    m: int
    T: float = math.nan

    @property
    def order(self) -> int:
        return len(self.d) - 1

    def is_zero(self, i: int, rel: float = D_TOL) -> bool:
        return abs(self.d[i]) <= rel * self.scales[i]

    def all_zero(self, rel: float = D_TOL) -> bool:
        return all(self.is_zero(i, rel) for i in range(len(self.d)))

    def first_nonzero(self, rel: float = D_TOL):
        for i in range(len(self.d)):
            if not self.is_zero(i, rel):
                return i
        return None

    def recompute(self) -> tuple:
        return _d_values(self.A, self.B, self.C, self.n, self.m, self.order)[0]


def _d_values(A, B, C, n, m, N):
    ds, scales = [], []
    for i in range(N + 1):
        parts = []
        for j in range(i + 1):
            w = factorial(j) * factorial(i - j)
            parts.append(A[m, j] * (B[n, i - j] - C[n, i - j]) * w)
            parts.append(-A[n, j] * (B[m, i - j] - C[m, i - j]) * w)
        ds.append(math.fsum(parts))
        mags = [abs(A[m, j] * B[n, i - j]) + abs(A[m, j] * C[n, i - j])
                + abs(A[n, j] * B[m, i - j]) + abs(A[n, j] * C[m, i - j])
                for j in range(i + 1)]
        scales.append(max(mags[j] * factorial(j) * factorial(i - j) for j in range(i + 1)))
    return tuple(ds), tuple(scales)


def obstruction_ledger(Fs: PowerSeries, Gs: PowerSeries, Hs: PowerSeries,
                       n: int, m: int, T: float = math.nan) -> ObstructionLedger:
    N = Fs.order
    if Gs.order != N or Hs.order != N:
        raise ValueError("series must share one order")
    A, B, C = {}, {}, {}
    for k in {n, m}:
        for table, s in ((A, Fs), (B, Gs), (C, Hs)):
            pk = power_coeffs(s, k)
            for i in range(N + 1):
                table[k, i] = pk[i]
    d, scales = _d_values(A, B, C, n, m, N)
    # rounding debris in the series can make the product scale itself tiny
    floor = 1.0 + max(abs(v) for table in (A, B, C) for v in table.values())
    scales = tuple(max(s, floor) for s in scales)
    return ObstructionLedger(A, B, C, d, scales, n, m, T)


def obstruction_for_pair(p: PiecewiseExpPoly, q: PiecewiseExpPoly, n: int, m: int,
                         N: int = DEFAULT_ORDER) -> ObstructionLedger:
    """Ledger for ``F = p 1_[0,T)``, ``G = p(.+T)``, ``H = q(.+T)`` at ``T = first_divergence(p, q)``."""
    T = first_divergence(p, q)
    if T is None:
        raise IdenticalFunctions("p and q agree everywhere")
    Fs = taylor_at_zero(p, N) if T > 0 else PowerSeries([0.0] * (N + 1))
    Gs = taylor_at_zero(tail_at(p, T), N)
    Hs = taylor_at_zero(tail_at(q, T), N)
    return obstruction_ledger(Fs, Gs, Hs, n, m, T)


@dataclass(frozen=True)
class BoundaryVerdict:
    """Which necessary conditions at the junction ``(u, v) = (G(0), H(0))`` hold."""

    head: str
    u: float
    v: float
    checks: dict  # condition label -> bool

    @property
    def consistent(self) -> bool:
        return all(self.checks.values())

    @property
    def violated(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]


def _eq(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def boundary_relation(u: float, v: float, head: str, n: int, m: int,
                      tol: float = 1e-10) -> BoundaryVerdict:
    """Necessary relations between ``G(0) = u`` and ``H(0) = v`` for equal ratios.

    ``head`` is ``"one"`` for ``F(0) = 1`` or ``"zero"`` for ``F(0) = 0``.
    With ``F(0) = 1``: equal values need ``u = 0`` or ``u^(n-m) = m/n``;
    distinct values (ordered so ``u > v``) need ``u^n - u^m = v^n - v^m``,
    ``v < x0``, ``u >= 1 => v <= 0`` and, for odd ``n`` / even ``m``, ``u <= 1``.
    With ``F(0) = 0``: equal values need ``u = 0``; distinct values need an
    even ``n`` and ``v = -u``.
    """
    checks: dict[str, bool] = {}
    same = _eq(u, v, tol)
    if head == ONE:
        if same:
            checks["u = 0 or u^(n-m) = m/n"] = _eq(u, 0.0, tol) or _eq(u ** (n - m), m / n, tol)
        else:
            if u < v:
                u, v = v, u
            x0 = (m / n) ** (1.0 / (n - m))
            checks["u^n - u^m = v^n - v^m"] = _eq(u ** n - u ** m, v ** n - v ** m, tol)
            checks["v < x0"] = v < x0
            checks["u >= 1 implies v <= 0"] = not (u >= 1) or v <= 0
            if n % 2 == 1 and m % 2 == 0:
                checks["n odd, m even implies u <= 1"] = u <= 1
    elif head == ZERO:
        if same:
            checks["u = 0"] = _eq(u, 0.0, tol)
        else:
            checks["n must be even"] = n % 2 == 0
            checks["v = -u"] = _eq(v, -u, tol)
    else:
        raise ValueError("head must be 'one' or 'zero'")
    return BoundaryVerdict(head, u, v, checks)
