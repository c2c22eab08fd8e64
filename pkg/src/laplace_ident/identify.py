"""Identifiability verdicts from the sufficient conditions for ``p(0) = 1`` and ``p(0) = 0``.

All checks are made within the representable class of piecewise
exp-poly-trig functions; a verdict of ``identified`` means no ``q`` of the
stated class with the same ratio differs from ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import AssumptionViolated, BadNormalization
from .fnmodel import PiecewiseExpPoly, RangeInfo, eval_terms, piece_ranges, taylor_at_zero
from .numerics import bisect
from .ratio import AssumptionReport, assumptions_check

T1_1, T1_2 = "T1_1", "T1_2"
IDENTIFIED = "identified"
UP_TO_SIGN = "identified_up_to_sign"
NOT_COVERED = "not_covered"
ASSUMPTION_VIOLATED = "assumption_violated"
INDETERMINATE = "indeterminate"

HOLDS, FAILS, UNSURE = "holds", "fails", "indeterminate"
MARGIN = 1e-9


@dataclass(frozen=True)
class ShapeReport:
    """Shape of ``x**n - x**m``: decreasing on ``[0, x0]``, increasing after."""

    n: int
    m: int
    x0: float
    parity_class: str
    negative_axis_behavior: str

    @property
    def decreasing_interval(self) -> tuple:
        return (0.0, self.x0)

    @property
    def increasing_interval(self) -> tuple:
        return (self.x0, math.inf)


def _check_nm(n: int, m: int) -> None:
    rep = assumptions_check(PiecewiseExpPoly.constant(1.0), n, m)
    if not rep.ok:
        raise AssumptionViolated(rep)


def x0_and_shape(n: int, m: int) -> ShapeReport:
    _check_nm(n, m)
    x0 = (m / n) ** (1.0 / (n - m))
    if n % 2 and m % 2:
        parity, neg = "both_odd", "odd_function"
    elif n % 2:
        parity, neg = "n_odd_m_even", "increasing"
    else:
        parity, neg = "n_even_m_odd", "decreasing"
    return ShapeReport(n, m, x0, parity, neg)


@dataclass
class IdentVerdict:
    theorem: str
    verdict: str
    matched_condition: Optional[int] = None
    witnesses: list = field(default_factory=list)   # (condition, description, t, value)
    class_constraints_on_q: str = ""
    conditions: dict = field(default_factory=dict)  # index -> holds/fails/indeterminate
    normalization: float = 1.0
    notes: list = field(default_factory=list)


# -- elementary condition tests ------------------------------------------------

def _above(info: RangeInfo, thr: float, strict: bool) -> str:
    """Does ``f(t) > thr`` (or ``>=``) hold on the whole interval described by ``info``?"""
    lo = info.inf_value
    if lo > thr + MARGIN:
        return HOLDS
    if lo < thr - MARGIN:
        return FAILS
    if not strict:
        return HOLDS
    if not info.inf_attained:
        return HOLDS   # the infimum is only approached, never reached
    return FAILS if info.certified else UNSURE


def _bound_check(f: PiecewiseExpPoly, thr: float, strict: bool, label: str, cond: int,
                 witnesses: list) -> str:
    """Piece by piece, so an exact piece can settle a failure an inexact one leaves open."""
    status, bad = HOLDS, None
    for info in piece_ranges(f, 0.0, math.inf):
        s = _above(info, thr, strict)
        if s == FAILS or (s == UNSURE and status == HOLDS):
            status, bad = s, info
        if s == FAILS:
            break
    if bad is not None:
        rel = ">" if strict else ">="
        witnesses.append((cond, f"{label}(t) {rel} {thr:.6g} broken: inf = {bad.inf_value:.6g}",
                          float(bad.inf_witness), float(bad.inf_value)))
    return status


def _nonzero_check(f: PiecewiseExpPoly, label: str, cond: int, witnesses: list) -> str:
    """``f(t) != 0`` for every ``t > 0``, decided piece by piece."""
    worst = HOLDS
    for info in piece_ranges(f, 0.0, math.inf):
        pos = _above(info, 0.0, True)
        neg = _above(RangeInfo(-info.sup_value, -info.inf_value, info.sup_witness,
                               info.inf_witness, info.certified, info.sup_attained,
                               info.inf_attained), 0.0, True)
        if HOLDS in (pos, neg):
            continue
        status = UNSURE if UNSURE in (pos, neg) else FAILS
        t_zero = _locate_zero(f, info)
        value = float(f(t_zero)) if math.isfinite(t_zero) else 0.0
        witnesses.append((cond, f"{label}(t) = 0 at some t > 0", float(t_zero), value))
        worst = FAILS if FAILS in (worst, status) else status
        if worst == FAILS:
            break
    return worst


def _locate_zero(f: PiecewiseExpPoly, info: RangeInfo) -> float:
    a, b = info.inf_witness, info.sup_witness
    if info.inf_value == 0.0:
        return a
    if info.sup_value == 0.0:
        return b
    if math.isfinite(a) and math.isfinite(b) and a != b:
        lo, hi = min(a, b), max(a, b)
        piece = f.piece_at(lo)
        if f.piece_at(hi) is piece or f.piece_at(hi) == piece:
            try:
                return bisect(lambda x: float(eval_terms(piece.terms, x)), lo, hi)
            except ValueError:
                pass
    return a


def _positive_near_zero(f: PiecewiseExpPoly, order: int = 20) -> bool:
    s = taylor_at_zero(f, order)
    scale = max((abs(c) for c in s.coeffs), default=0.0)
    i = s.leading_index(1e-12 * scale)
    return i is not None and s[i] > 0


def _assumption_verdict(theorem: str, rep: AssumptionReport) -> IdentVerdict:
    return IdentVerdict(theorem, ASSUMPTION_VIOLATED, notes=list(rep.details))


def _finish(v: IdentVerdict, up_to_sign: Optional[int] = None,
            preference: tuple = (1, 2, 3)) -> IdentVerdict:
    held = [i for i in preference if v.conditions.get(i) == HOLDS]
    if held:
        v.verdict, v.matched_condition = IDENTIFIED, held[0]
    elif up_to_sign is not None:
        v.verdict, v.matched_condition = UP_TO_SIGN, up_to_sign
    elif UNSURE in v.conditions.values():
        v.verdict = INDETERMINATE
    else:
        v.verdict = NOT_COVERED
    return v


# -- the two checkers -------------------------------------------------------------

def check_theorem1(p: PiecewiseExpPoly, q: Optional[PiecewiseExpPoly], n: int, m: int) -> IdentVerdict:
    """Sufficient conditions for identification when ``p(0) = 1``.

    ``p`` is rescaled by ``p(0)`` when that is finite and nonzero (``q`` along
    with it), which leaves ratio equality unchanged.
    """
    rep = assumptions_check(p, n, m)
    if not rep.ok:
        return _assumption_verdict(T1_1, rep)
    p0 = p(0.0)
    if p0 == 0.0 or not math.isfinite(p0):
        raise BadNormalization(f"p(0) = {p0}; need a finite nonzero value")
    v = IdentVerdict(T1_1, NOT_COVERED, normalization=p0)
    if abs(p0 - 1.0) > 1e-9:
        p = p.scale(1.0 / p0)
        q = q.scale(1.0 / p0) if q is not None else None
        v.notes.append(f"normalized by p(0) = {p0:.17g}")
    x0 = x0_and_shape(n, m).x0
    w = v.witnesses
    constraints = []

    s = _bound_check(p, x0, True, "p", 1, w)
    if q is not None and s == HOLDS:
        s = _bound_check(q, x0, False, "q", 1, w)
    elif q is None and s == HOLDS:
        constraints.append(f"(1) q(t) >= x0 = {x0:.17g} for all t > 0")
    v.conditions[1] = s

    s = _bound_check(p, 1.0, False, "p", 2, w)
    if q is not None and s == HOLDS:
        s = _bound_check(q, 0.0, True, "q", 2, w)
    elif q is None and s == HOLDS:
        constraints.append("(2) q(t) > 0 for all t > 0")
    v.conditions[2] = s

    if n % 2 == 1 and m % 2 == 0:
        v.conditions[3] = _bound_check(p, 1.0, True, "p", 3, w)
    else:
        v.conditions[3] = FAILS
        w.append((3, f"needs n odd and m even, got n={n}, m={m}", math.nan, math.nan))
    if v.conditions[3] == HOLDS:
        constraints.append("(3) no constraint on q")
    v.class_constraints_on_q = _constraint_text(constraints)
    # report the condition that constrains q the least
    return _finish(v, preference=(3, 2, 1))


def check_theorem2(p: PiecewiseExpPoly, q: Optional[PiecewiseExpPoly], n: int, m: int) -> IdentVerdict:
    """Sufficient conditions for identification when ``p(0) = 0``.

    Condition (2) without its sign-agreement clause still pins ``p`` down up
    to sign, reported as ``identified_up_to_sign``.
    """
    rep = assumptions_check(p, n, m)
    if not rep.ok:
        return _assumption_verdict(T1_2, rep)
    p0 = p(0.0)
    if abs(p0) > 1e-9:
        raise BadNormalization(f"p(0) = {p0}; need 0")
    v = IdentVerdict(T1_2, NOT_COVERED, normalization=1.0)
    w = v.witnesses
    constraints = []
    up_to_sign = None
    pq = p * q if q is not None else None

    if n % 2 == 1 and m % 2 == 0:
        v.conditions[1] = _nonzero_check(p, "p", 1, w)
        if v.conditions[1] == HOLDS:
            constraints.append("(1) no constraint on q")
    else:
        v.conditions[1] = FAILS
        w.append((1, f"needs n odd and m even, got n={n}, m={m}", math.nan, math.nan))

    if n % 2 == 1 and m % 2 == 1:
        s = _nonzero_check(p, "p", 2, w)
        if s == HOLDS:
            if pq is not None and _positive_near_zero(pq):
                v.conditions[2] = HOLDS
            else:
                v.conditions[2] = FAILS
                up_to_sign = 2
                if pq is None:
                    constraints.append("(2) inf{t : p(t)q(t) > 0} = 0; otherwise q = p or q = -p")
                else:
                    w.append((2, "p q is not positive near 0: only q = p or q = -p follows",
                              0.0, 0.0))
        else:
            v.conditions[2] = s
    else:
        v.conditions[2] = FAILS
        w.append((2, f"needs n and m odd, got n={n}, m={m}", math.nan, math.nan))

    if n % 2 == 0:
        if pq is not None:
            v.conditions[3] = _bound_check(pq, 0.0, True, "p q", 3, w)
        else:
            s = _nonzero_check(p, "p", 3, w)
            v.conditions[3] = s
            if s == HOLDS:
                constraints.append("(3) p(t) q(t) > 0 for all t > 0")
    else:
        v.conditions[3] = FAILS
        w.append((3, f"needs n even, got n={n}", math.nan, math.nan))

    v.class_constraints_on_q = _constraint_text(constraints)
    return _finish(v, up_to_sign)


def _constraint_text(items: list) -> str:
    if not items:
        return ""
    return ("within piecewise exp-poly-trig functions q satisfying any of: "
            + "; ".join(items))


def identify(p: PiecewiseExpPoly, q: Optional[PiecewiseExpPoly], n: int, m: int,
             theorem: str = "auto") -> IdentVerdict:
    """Dispatch to the checker for ``p(0) = 0`` or ``p(0) != 0`` (``theorem="auto"``)."""
    if theorem == "auto":
        theorem = "2" if abs(p(0.0)) <= 1e-9 else "1"
    if theorem in ("1", T1_1):
        return check_theorem1(p, q, n, m)
    if theorem in ("2", T1_2):
        return check_theorem2(p, q, n, m)
    raise ValueError(f"unknown theorem {theorem!r}")
