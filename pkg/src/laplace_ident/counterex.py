"""Counterexample families and the parameter equations of the exponential family.

For ``f(t) = exp(-a t)`` the two-segment functions with the same ratio as
``f`` are ``exp(-a t)`` on ``[0, T)`` followed by ``c exp(-a t) exp(a T)``,
where ``c**n - c**m = exp(-n a T) - exp(-m a T)``, plus at most one member
with a constant tail ``+-x0`` switched on at a special time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

from .errors import BadParams
from .fnmodel import SIN, Piece, PiecewiseExpPoly, term
from .numerics import bisect

FAMILIES = ("thm11a", "thm11b", "thm11c", "thm11d", "thm12a", "thm12b", "expfam",
            "const_tail", "remark14a", "remark14b")
# families whose pair has equal ratios; the remark presets are identifiable functions (q = p)
COUNTEREXAMPLES = FAMILIES[:8]
REMARK_STEPS = 12
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class Preset:
    family: str
    p: PiecewiseExpPoly
    q: PiecewiseExpPoly
    n: int
    m: int
    params: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.p, self.q, self.n, self.m))


def _nm(params: dict, default: tuple) -> tuple:
    n = int(params.get("n", default[0]))
    m = int(params.get("m", default[1]))
    if n <= m or m < 1 or gcd(n, m) != 1:
        raise BadParams(f"need coprime n > m >= 1, got n={n}, m={m}")
    return n, m


def _fixed_nm(family: str, params: dict, nm: tuple) -> tuple:
    given = (params.get("n", nm[0]), params.get("m", nm[1]))
    if tuple(int(v) for v in given) != nm:
        raise BadParams(f"{family} is stated for (n, m) = {nm}")
    return nm


def _exp(coeff: float, rate: float):
    return term(coeff, 0, rate)


def exp_member(a: float, T: float, c: float) -> PiecewiseExpPoly:
    """``exp(-a t)`` on ``[0, T)``, then ``c exp(a T) exp(-a t)``."""
    return PiecewiseExpPoly([Piece(0.0, (_exp(1.0, -a),)),
                             Piece(T, (_exp(c * math.exp(a * T), -a),))])


def const_tail_member(a: float, T: float, b: float) -> PiecewiseExpPoly:
    """``exp(-a t)`` on ``[0, T)``, then the constant ``b``."""
    return PiecewiseExpPoly([Piece(0.0, (_exp(1.0, -a),)), Piece(T, (term(b),))])


def remark_step(K: int = REMARK_STEPS) -> PiecewiseExpPoly:
    """Unit steps alternating 1, 2, 1, ..., kept for ``K`` steps with the last value held."""
    return PiecewiseExpPoly([Piece(float(k - 1), (term(1.0 if k % 2 else 2.0),))
                             for k in range(1, K + 1)])


def remark_ramp(K: int = REMARK_STEPS) -> PiecewiseExpPoly:
    """``t`` on ``[0, 1)`` followed by the alternating steps from the second on."""
    steps = remark_step(K).pieces[1:]
    return PiecewiseExpPoly([Piece(0.0, (term(1.0, 1),))] + list(steps))


def gen_preset(family: str, **params) -> Preset:
    """Build a named pair. Unknown families or invalid parameters raise ``BadParams``."""
    if family == "thm11a":
        c = float(params.get("c", 0.75))
        if not 0.5 < c < 1.0:
            raise BadParams(f"thm11a needs 1/2 < c < 1, got c={c}")
        n, m = _fixed_nm(family, params, (2, 1))
        T1, T2 = -math.log1p(-c), math.log(2 * c)
        p = PiecewiseExpPoly([Piece(0.0, (_exp(1.0, -1.0),)),
                              Piece(T1, (_exp(c * math.exp(T1), -1.0),)),
                              Piece(T1 + T2, (term(0.5),))])
        q = const_tail_member(1.0, math.log(2.0), 0.5)
        return Preset(family, p, q, n, m, {"c": c, "T1": T1, "T2": T2})
    if family == "thm11b":
        n, m = _nm(params, (2, 1))
        return Preset(family, PiecewiseExpPoly.constant(1.0), PiecewiseExpPoly.indicator(0.0, 1.0), n, m)
    if family == "thm11c":
        n, m = _fixed_nm(family, params, (2, 1))
        q = PiecewiseExpPoly([Piece(0.0, (_exp(1.0, 1.0),)),
                              Piece(1.0, (_exp(math.exp(-1.0) - 1.0, 1.0),))])
        return Preset(family, PiecewiseExpPoly.from_terms([_exp(1.0, 1.0)]), q, n, m)
    if family == "thm11d":
        n, m = _fixed_nm(family, params, (3, 1))
        T1 = math.log(2.0) - 0.5 * math.log(3.0)
        q = const_tail_member(-1.0, T1, -1.0 / math.sqrt(3.0))
        return Preset(family, PiecewiseExpPoly.from_terms([_exp(1.0, 1.0)]), q, n, m, {"T1": T1})
    if family == "thm12a":
        n, m = _nm(params, (2, 1))
        p = PiecewiseExpPoly.from_terms([term(1.0, 0, 0.0, 1.0, SIN)])
        return Preset(family, p, p.restrict(0.0, 2 * math.pi), n, m)
    if family == "thm12b":
        n, m = _fixed_nm(family, params, (2, 1))
        p = PiecewiseExpPoly.from_terms([term(1.0, 1)])
        return Preset(family, p, p - PiecewiseExpPoly.indicator(1.0, value=2.0), n, m)
    if family == "expfam":
        n, m = _nm(params, (2, 1))
        a = float(params.get("a", 1.0))
        T = float(params.get("T", math.log(3.0)))
        if a == 0 or not T > 0:
            raise BadParams("expfam needs a != 0 and T > 0")
        nontrivial = [r for r in solve_c(n, m, a, T) if not r.trivial]
        if not nontrivial:
            raise BadParams(f"no nontrivial c for n={n}, m={m}, a={a}, T={T}")
        c = nontrivial[0].root
        f = PiecewiseExpPoly.from_terms([_exp(1.0, -a)])
        return Preset(family, f, exp_member(a, T, c), n, m, {"a": a, "T": T, "c": c})
    if family == "const_tail":
        n, m = _nm(params, (2, 1))
        a = float(params.get("a", 1.0))
        st = special_times(n, m, a)
        f = PiecewiseExpPoly.from_terms([_exp(1.0, -a)])
        if st.T2 is not None:
            q = const_tail_member(a, st.T2, st.b0)
            extra = {"a": a, "T": st.T2, "b": st.b0}
        elif st.T1 is not None:
            q = const_tail_member(a, st.T1, -st.b0)
            extra = {"a": a, "T": st.T1, "b": -st.b0}
        else:
            raise BadParams(f"no constant-tail member for n={n}, m={m}, a={a}")
        return Preset(family, f, q, n, m, extra)
    if family in ("remark14a", "remark14b"):
        n, m = _nm(params, (2, 1))
        K = int(params.get("K", REMARK_STEPS))
        if K < 2:
            raise BadParams("need at least two steps")
        p = remark_step(K) if family == "remark14a" else remark_ramp(K)
        return Preset(family, p, p, n, m, {"K": K})
    raise BadParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# -- the exponential family ---------------------------------------------------------

@dataclass(frozen=True)
class CRoot:
    root: float
    trivial: bool
    multiplicity: int = 1
    residual: float = 0.0  # |g(root)| relative to max(1, |root|^n + |root|^m + |rhs|)


def _rhs(n: int, m: int, a: float, T: float) -> float:
    return math.exp(-n * a * T) - math.exp(-m * a * T)


def _check(n: int, m: int) -> None:
    if n <= m or m < 1 or gcd(n, m) != 1:
        raise BadParams(f"need coprime n > m >= 1, got n={n}, m={m}")


def solve_c(n: int, m: int, a: float, T: float) -> list[CRoot]:
    """All real ``c`` with ``c**n - c**m = exp(-n a T) - exp(-m a T)``, sorted.

    ``x**n - x**m`` is monotone between its critical points ``0``, ``x0`` and
    (for even ``n - m``) ``-x0``, so each segment of the search window holds at
    most one root. A critical point where the polynomial vanishes is a double root.
    """
    _check(n, m)
    R = _rhs(n, m, a, T)
    trivial_c = math.exp(-a * T)

    def g(x):
        return x ** n - x ** m - R

    def scale(x):
        return max(1.0, abs(x) ** n + abs(x) ** m + abs(R))

    x0 = (m / n) ** (1.0 / (n - m))
    lo = -(1.0 + abs(R)) ** (1.0 / (n - m)) - 1.0
    hi = (1.0 + abs(R)) ** (1.0 / m) + 1.0
    crit = {0.0, x0}
    if (n - m) % 2 == 0:
        crit.add(-x0)
    crit = sorted(c for c in crit if lo < c < hi)
    knots = [lo] + crit + [hi]
    vals = {}
    doubles = []
    for x in knots:
        v = g(x)
        if x in crit and abs(v) <= ROOT_TOL * scale(x):
            v = 0.0
            doubles.append(x)
        vals[x] = v

    roots = []
    for x in doubles:
        roots.append((x, 2))
    for a_, b_ in zip(knots[:-1], knots[1:]):
        ga, gb = vals[a_], vals[b_]
        if ga == 0.0 or gb == 0.0 or (ga > 0) == (gb > 0):
            continue
        roots.append((bisect(g, a_, b_), 1))

    out = []
    for x, mult in sorted(roots):
        triv = abs(x - trivial_c) <= 1e-9 * max(1.0, abs(trivial_c))
        out.append(CRoot(x, triv, mult, abs(g(x)) / scale(x)))
    return out


@dataclass(frozen=True)
class SpecialTimes:
    T2: Optional[float]
    T1: Optional[float]
    b0: float


def special_times(n: int, m: int, a: float) -> SpecialTimes:
    """Switch times for the constant-tail members.

    ``T2 = ln(n/m) / ((n-m) a)`` exists for ``a > 0``; for ``a < 0`` with both
    ``n`` and ``m`` odd, ``T1 > 0`` solves ``b0**m - b0**n = exp(-n a T) - exp(-m a T)``
    with ``b0 = x0``.
    """
    _check(n, m)
    if a == 0:
        raise BadParams("a must be nonzero")
    b0 = (m / n) ** (1.0 / (n - m))
    T2 = math.log(n / m) / ((n - m) * a) if a > 0 else None
    T1 = None
    if a < 0 and n % 2 == 1 and m % 2 == 1:
        target = b0 ** m - b0 ** n

        def h(T):
            return _rhs(n, m, a, T) - target

        hi = 1.0
        while h(hi) < 0:
            hi *= 2.0
        T1 = bisect(h, 0.0, hi)
    return SpecialTimes(T2, T1, b0)


@dataclass(frozen=True)
class FamilyClassification:
    case: str
    members: tuple
    includes_negatives: bool
    singleton: bool = False
    T1: Optional[float] = None
    T2: Optional[float] = None
    b0: float = math.nan


def family_classify(n: int, m: int, a: float) -> FamilyClassification:
    """Which two-segment functions share the ratio of ``exp(-a t)``.

    Negated members join the set exactly when ``n - m`` is even.
    """
    st = special_times(n, m, a)
    neg = (n - m) % 2 == 0
    fam = f"exp(-a t) on [0,T), then c exp(a T) exp(-a t), with c^{n} - c^{m} = exp(-{n} a T) - exp(-{m} a T), T > 0"
    if a > 0:
        members = (fam, f"exp(-a t) on [0,T2), then the constant b0 = {st.b0:.17g}, T2 = {st.T2:.17g}")
        return FamilyClassification("a_pos", members, neg, False, None, st.T2, st.b0)
    if n % 2 == 1 and m % 2 == 1:
        members = (fam, f"exp(-a t) on [0,T1), then the constant -b0 = {-st.b0:.17g}, T1 = {st.T1:.17g}")
        return FamilyClassification("a_neg_both_odd", members, neg, False, st.T1, None, st.b0)
    if n % 2 == 1:
        # only the trivial root survives: x^n - x^m < 0 on (-inf, 1) while the right side is positive
        return FamilyClassification("a_neg_n_minus_m_odd", ("f only",), neg, True, None, None, st.b0)
    return FamilyClassification("a_neg_n_minus_m_odd", (fam,), neg, False, None, None, st.b0)
