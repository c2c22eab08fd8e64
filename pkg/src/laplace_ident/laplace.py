"""Closed-form Laplace transforms of piecewise exp-poly-trig functions.

A transform is a finite sum of atoms ``exp(-lam*T) * P(lam) / Q(lam)`` with
real polynomials and ``deg P < deg Q``. Denominators are kept factored into
linear factors ``(lam - b)`` and conjugate-pair quadratics
``(lam - b)**2 + w**2``; adding and multiplying atoms then never needs a
polynomial GCD, only least common multiples of factor multiplicities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError
from .fnmodel import COS, NONE, SIN, PiecewiseExpPoly, eval_terms
from .numerics import adaptive_simpson

DELAY_TOL = 1e-12
POLE_TOL = 1e-12
POLE_DIGITS = 11     # pole binning used when matching denominators by hash
CANCEL_ULPS = 64      # same-denominator sums this close to zero count as exact cancellation
DEFAULT_MARGIN = 0.1

Factor = tuple  # (re, im, multiplicity); im > 0 marks a quadratic factor


def _factor_poly(re: float, im: float) -> np.ndarray:
    if im > 0:
        return np.array([re * re + im * im, -2.0 * re, 1.0])
    return np.array([-re, 1.0])


def _same_pole(f: Factor, g: Factor) -> bool:
    return abs(f[0] - g[0]) <= POLE_TOL and abs(f[1] - g[1]) <= POLE_TOL


def _merge_factors(a: Sequence[Factor], b: Sequence[Factor], how) -> tuple:
    out = [list(f) for f in a]
    for g in b:
        for f in out:
            if _same_pole(f, g):
                f[2] = how(f[2], g[2])
                break
        else:
            out.append(list(g) if how is not max else list(g))
    return tuple(sorted((f[0], f[1], f[2]) for f in out))


def _factor_key(factors: Sequence[Factor]) -> tuple:
    """Hashable denominator identity; poles are binned well below any distinct-pole gap."""
    return tuple((round(re, POLE_DIGITS), round(im, POLE_DIGITS), m) for re, im, m in factors)


def _deg(factors: Sequence[Factor]) -> int:
    return sum((2 if im > 0 else 1) * m for _, im, m in factors)


@dataclass(frozen=True)
class TransformAtom:
    """``exp(-lam*delay) * num(lam) / prod(factors)``; ``num`` ascending."""

    delay: float
    num: tuple
    factors: tuple

    def __post_init__(self):
        num = tuple(float(c) for c in np.trim_zeros(np.asarray(self.num, dtype=float), "b")) or (0.0,)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "factors", tuple(sorted(tuple(f) for f in self.factors)))
        if len(num) - 1 >= _deg(self.factors) and any(num):
            raise ValueError("atom must be a proper rational function")

    @property
    def den(self) -> tuple:
        """Monic denominator coefficients, ascending."""
        q = np.array([1.0])
        for re, im, m in self.factors:
            for _ in range(m):
                q = P.polymul(q, _factor_poly(re, im))
        return tuple(float(c) for c in q)

    @property
    def poles(self) -> list[complex]:
        return [complex(re, im) for re, im, _ in self.factors]

    def den_at(self, lam: float) -> float:
        out = 1.0
        for re, im, m in self.factors:
            out *= ((lam - re) ** 2 + im * im) ** m if im > 0 else (lam - re) ** m
        return out

    def rational_at(self, z):
        """``num(z) / den(z)`` without the delay factor; accepts complex arrays."""
        return P.polyval(z, self.num) / self.den_at(z)

    def __call__(self, lam: float) -> float:
        return math.exp(-lam * self.delay) * float(P.polyval(lam, self.num)) / self.den_at(lam)

    def magnitude(self, lam: float) -> float:
        """Scale of the rounding error in ``self(lam)``: numerator with absolute coefficients."""
        num = float(P.polyval(abs(lam), np.abs(self.num)))
        return math.exp(-lam * self.delay) * num / abs(self.den_at(lam))

    def mp_value(self, lam):
        lam = mpmath.mpf(lam)
        num = mpmath.polyval([mpmath.mpf(c) for c in reversed(self.num)], lam)
        den = mpmath.mpf(1)
        for re, im, m in self.factors:
            re, im = mpmath.mpf(re), mpmath.mpf(im)
            den *= ((lam - re) ** 2 + im * im) ** m if im > 0 else (lam - re) ** m
        return mpmath.exp(-lam * mpmath.mpf(self.delay)) * num / den

    def __mul__(self, other: "TransformAtom") -> "TransformAtom":
        return TransformAtom(self.delay + other.delay, tuple(P.polymul(self.num, other.num)),
                             _merge_factors(self.factors, other.factors, lambda x, y: x + y))

    def scaled(self, c: float) -> "TransformAtom":
        return TransformAtom(self.delay, tuple(c * x for x in self.num), self.factors)


def _lcm(factor_lists: Iterable[Sequence[Factor]]) -> tuple:
    out: tuple = ()
    for fl in factor_lists:
        out = _merge_factors(out, fl, max)
    return out


def _lift(atom: TransformAtom, target: Sequence[Factor]) -> np.ndarray:
    """Numerator of ``atom`` rewritten over the denominator ``target``, in long double.

    The lift multiplies by many factors and its rounding, not the input,
    dominates the residual of a high-degree group; the extra bits of
    ``np.longdouble`` (where the platform has them) keep it below tolerance.
    """
    num = np.asarray(atom.num, dtype=np.longdouble)
    for re, im, m in target:
        own = next((f[2] for f in atom.factors if _same_pole(f, (re, im, m))), 0)
        if m > own:
            num = np.convolve(num, _factor_power(re, im, m - own))
    return num


@lru_cache(maxsize=4096)
def _factor_power(re: float, im: float, k: int) -> np.ndarray:
    re, im = np.longdouble(re), np.longdouble(im)
    base = np.array([re * re + im * im, -2 * re, 1], dtype=np.longdouble) if im > 0 \
        else np.array([-re, 1], dtype=np.longdouble)
    out = np.ones(1, dtype=np.longdouble)
    for _ in range(k):
        out = np.convolve(out, base)
    return out


@dataclass(frozen=True)
class GroupSum:
    """One delay group brought to a common denominator."""

    delay: float
    num: np.ndarray
    factors: tuple
    scale: float

    @property
    def residual(self) -> float:
        """Largest numerator coefficient relative to the largest contribution."""
        if self.scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.num))) / self.scale


@dataclass(frozen=True)
class TransformExpr:
    """Sum of delayed proper rational atoms, grouped by delay.

    ``sigma`` bounds the real part of every pole and the growth abscissa of
    the transformed function; ``-inf`` means the transform is entire.
    """

    atoms: tuple
    sigma: float = -math.inf

    def __post_init__(self):
        object.__setattr__(self, "atoms", _normalize_atoms(self.atoms))
        poles = max((f[0] for a in self.atoms for f in a.factors), default=-math.inf)
        object.__setattr__(self, "sigma", max(float(self.sigma), poles))

    @property
    def delays(self) -> list[float]:
        return sorted({a.delay for a in self.atoms})

    def group(self, delay: float) -> list[TransformAtom]:
        return [a for a in self.atoms if abs(a.delay - delay) <= DELAY_TOL]

    def group_sum(self, delay: float) -> GroupSum:
        return _group_sum(self.group(delay), delay)

    def group_residuals(self) -> dict:
        return {d: self.group_sum(d).residual for d in self.delays}

    def __add__(self, other: "TransformExpr") -> "TransformExpr":
        return TransformExpr(self.atoms + other.atoms, max(self.sigma, other.sigma))

    def __neg__(self) -> "TransformExpr":
        return self.scaled(-1.0)

    def __sub__(self, other: "TransformExpr") -> "TransformExpr":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scaled(float(other))
        return TransformExpr(tuple(a * b for a in self.atoms for b in other.atoms),
                             max(self.sigma, other.sigma))

    __rmul__ = __mul__

    def scaled(self, c: float) -> "TransformExpr":
        return TransformExpr(tuple(a.scaled(c) for a in self.atoms), self.sigma)

    def __call__(self, lam: float, margin: float = DEFAULT_MARGIN) -> float:
        return eval_transform(self, lam, margin)


def _group_sum(atoms: list, delay: float) -> GroupSum:
    target = _lcm(a.factors for a in atoms)
    lifted = [_lift(a, target) for a in atoms]
    width = max((len(x) for x in lifted), default=1)
    padded = [np.pad(x, (0, width - len(x))) for x in lifted]
    total = np.sum(padded, axis=0) if padded else np.zeros(1)
    scale = max((float(np.max(np.abs(x))) for x in padded), default=0.0)
    return GroupSum(delay, total, target, scale)


def difference_residuals(A: TransformExpr, B: TransformExpr) -> dict:
    """Per-delay residual of ``A - B``, scaled by the terms before they cancel.

    Forming ``A - B`` first would merge equal denominators and hide the size
    of what cancelled, so rounding debris would look like a full mismatch.
    """
    atoms = sorted(list(A.atoms) + [b.scaled(-1.0) for b in B.atoms], key=lambda a: a.delay)
    groups: list[tuple[float, list]] = []
    for a in atoms:
        if groups and a.delay - groups[-1][0] <= DELAY_TOL:
            groups[-1][1].append(a)
        else:
            groups.append((a.delay, [a]))
    return {d: _vanishing_residual(g, d) for d, g in groups}


def _vanishing_residual(atoms: list, delay: float) -> float:
    """How far one delay group is from summing to zero, relative to its parts.

    Two certificates are tried. Atoms sharing a denominator are summed first
    and each bucket is measured against its own inputs; if any bucket is left
    over, the survivors are lifted onto one common denominator. The smaller
    residual wins: lifting onto a denominator of high degree amplifies
    rounding far beyond the inputs, while buckets alone miss cancellation
    across different denominators.
    """
    buckets: dict = {}
    for a in atoms:
        buckets.setdefault(_factor_key(a.factors), (a.factors, []))[1].append(a)
    kept, scale, worst = [], 0.0, 0.0
    for fs, members in buckets.values():
        width = max(len(a.num) for a in members)
        stack = np.array([np.pad(np.asarray(a.num), (0, width - len(a.num))) for a in members])
        total = stack.sum(axis=0)
        big = float(np.max(np.abs(stack)))
        scale = max(scale, big)
        left = float(np.max(np.abs(total)))
        if big == 0.0 or left <= CANCEL_ULPS * np.finfo(float).eps * len(members) * big:
            continue
        worst = max(worst, left / big)
        kept.append(TransformAtom(members[0].delay, tuple(total), fs))
    if worst <= CANCEL_ULPS * np.finfo(float).eps:
        return worst
    gs = _group_sum(kept, delay)
    lifted = float(np.max(np.abs(gs.num))) / max(gs.scale, scale)
    if lifted <= CANCEL_ULPS * np.finfo(float).eps:
        return min(worst, lifted)
    return min(worst, lifted, _interpolation_residual(kept, gs.factors))


def _interpolation_residual(atoms: list, target: tuple) -> float:
    """Largest relative value of the group's rational sum on ``deg + 1`` circle points.

    The summed numerator has degree below ``deg`` (the common denominator's
    degree), so vanishing at ``deg + 1`` distinct points makes it vanish
    identically. Points sit on a circle to the right of every pole, where the
    interpolation is a discrete Fourier transform and so perfectly conditioned;
    unlike the lifted coefficients this never multiplies out the denominator.
    """
    K = _deg(target)
    res = [f[0] for f in target]
    r = max(1.0, max(f[1] for f in target), max(res) - min(res))
    z = max(res) + 2.0 + r + r * np.exp(2j * np.pi * np.arange(K + 1) / (K + 1))
    vals = np.array([a.rational_at(z) for a in atoms])
    total = np.abs(vals.sum(axis=0))
    mags = np.abs(vals).sum(axis=0)
    return float(np.max(np.where(mags > 0, total / np.where(mags > 0, mags, 1.0), 0.0)))


def _normalize_atoms(atoms: Iterable[TransformAtom]) -> tuple:
    atoms = sorted(atoms, key=lambda a: a.delay)
    groups: dict = {}
    anchor = None
    for a in atoms:
        if anchor is None or a.delay - anchor > DELAY_TOL:
            anchor = a.delay
        key = (anchor, _factor_key(a.factors))
        if key in groups:
            groups[key][1].append(a.num)
        else:
            groups[key] = (a.factors, [a.num])
    out = []
    for (delay, _), (factors, nums) in groups.items():
        num = nums[0] if len(nums) == 1 else _sum_polys(nums)
        if any(num):
            out.append(TransformAtom(delay, tuple(num), factors))
    return tuple(out)


def _sum_polys(nums) -> np.ndarray:
    width = max(len(x) for x in nums)
    return np.sum([np.pad(np.asarray(x, dtype=float), (0, width - len(x))) for x in nums], axis=0)


def _term_tail(coeff: float, k: int, b: float, w: float, trig: str, T: float) -> TransformAtom:
    """Atom for ``int_T^inf exp(-lam t) coeff t^k e^{bt} trig(wt) dt``.

    Uses ``int_T^inf t^k e^{-(lam-z)t} dt = e^{-(lam-z)T} sum_j k!/(k-j)! T^(k-j) / (lam-z)^(j+1)``.
    """
    weights = [factorial(k) / factorial(k - j) * T ** (k - j) for j in range(k + 1)]
    if trig == NONE:
        shift = np.array([-b, 1.0])
        num = np.zeros(1)
        for j, c in enumerate(weights):
            num = P.polyadd(num, c * P.polypow(shift, k - j))
        num = num * coeff * math.exp(b * T)
        return TransformAtom(T, tuple(num), ((b, 0.0, k + 1),))
    z = complex(b, w)
    quad = _factor_poly(b, w).astype(complex)
    conj_shift = np.array([-z.conjugate(), 1.0], dtype=complex)
    num = np.zeros(1, dtype=complex)
    for j, c in enumerate(weights):
        part = P.polymul(P.polypow(conj_shift, j + 1), P.polypow(quad, k - j))
        num = P.polyadd(num, c * part)
    num = num * np.exp(z * T)
    real = coeff * (num.real if trig == COS else num.imag)
    return TransformAtom(T, tuple(real), ((b, w, k + 1),))


def transform(f: PiecewiseExpPoly) -> TransformExpr:
    """Exact Laplace transform of ``f`` as a delayed-rational expression."""
    atoms = []
    for a, b, terms in f.bounds():
        for tm in terms:
            atoms.append(_term_tail(tm.coeff, tm.tpow, tm.rate, tm.freq, tm.trig, a))
            if math.isfinite(b):
                atoms.append(_term_tail(tm.coeff, tm.tpow, tm.rate, tm.freq, tm.trig, b).scaled(-1.0))
    return TransformExpr(tuple(atoms), f.sigma)


def _domain_floor(sigma: float) -> float:
    return 0.0 if sigma == -math.inf else sigma


def eval_transform(T: TransformExpr, lam: float, margin: float = DEFAULT_MARGIN,
                   dps: Optional[int] = None):
    """``sum exp(-lam T_i) P_i(lam) / Q_i(lam)``.

    With ``dps`` set, evaluation runs in mpmath at that many digits and an
    ``mpf`` is returned.
    """
    if not lam > _domain_floor(T.sigma) + margin:
        raise DomainError(f"lambda={lam} is not above abscissa {T.sigma} + margin {margin}")
    if dps is not None:
        with mpmath.workdps(dps):
            return mpmath.fsum(a.mp_value(lam) for a in T.atoms)
    return math.fsum(a(lam) for a in T.atoms)


def _tail_bound(terms, lam: float, X: float) -> float:
    """Exact ``int_X^inf sum |c| t^k e^{(b - lam) t} dt`` (trig factors bounded by 1)."""
    total = 0.0
    for tm in terms:
        s = lam - tm.rate
        k = tm.tpow
        acc = sum(factorial(k) / factorial(k - j) * X ** (k - j) / s ** (j + 1) for j in range(k + 1))
        total += abs(tm.coeff) * math.exp(-s * X) * acc
    return total


def numeric_transform(f: PiecewiseExpPoly, lam: float, tol: float = 1e-10,
                      margin: float = DEFAULT_MARGIN) -> float:
    """Laplace transform at ``lam`` by adaptive Simpson quadrature.

    Piece boundaries are mandatory breakpoints. The unbounded piece is cut at
    the first ``X`` (doubling search) whose exact absolute tail integral is
    below ``tol * 1e-2``.
    """
    if not lam > _domain_floor(f.sigma) + margin:
        raise DomainError(f"lambda={lam} is not above abscissa {f.sigma} + margin {margin}")
    bounds = f.bounds()
    share = tol / (2 * len(bounds))
    parts = []
    for a, b, terms in bounds:
        if not terms:
            continue
        if math.isinf(b):
            width = 1.0
            while _tail_bound(terms, lam, a + width) > tol * 1e-2:
                width *= 2.0
            b = a + width

        def integrand(t, terms=terms):
            return np.exp(-lam * t) * eval_terms(terms, t)

        parts.append(adaptive_simpson(integrand, a, b, share))
    return math.fsum(parts)


def asymptotic_coeffs(T: TransformExpr, N: int) -> list[float]:
    """Coefficients ``c_i`` of ``c_i / lam**(i+1)`` in the large-``lam`` expansion.

    Only the undelayed group contributes; delayed atoms are exponentially small.
    """
    out = np.zeros(N + 1)
    for atom in T.atoms:
        if atom.delay > DELAY_TOL:
            continue
        den = np.asarray(atom.den)
        D = len(den) - 1
        num = np.zeros(D)
        num[: len(atom.num)] = atom.num
        # in u = 1/lam: num/den = u * (reversed num)(u) / (reversed den)(u)
        rn = num[::-1]
        rd = den[::-1]
        c = np.zeros(N + 1)
        for i in range(N + 1):
            acc = rn[i] if i < len(rn) else 0.0
            for j in range(1, min(i, D) + 1):
                acc -= rd[j] * c[i - j]
            c[i] = acc / rd[0]
        out += c
    return [float(x) for x in out]
