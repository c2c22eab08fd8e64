"""Piecewise exponential-polynomial-trigonometric functions on [0, inf).

A function is an ordered tuple of right-open pieces. Each piece carries a
finite sum of terms ``coeff * t**tpow * exp(rate*t) * trig(freq*t)`` written
in the absolute variable ``t`` (not relative to the piece start).

Products and powers go through a complex-exponential expansion
(``cos(wt) = (e^{iwt} + e^{-iwt})/2``) and are collected back into real
cos/sin terms, so identities like ``sin^2 = 1/2 - cos(2t)/2`` come out
exactly up to rounding of the coefficients.
"""

from __future__ import annotations

import bisect as _bisect
import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NonVanishingHead
from .numerics import bisect, cauchy_bound, real_roots

NONE, COS, SIN = "none", "cos", "sin"
_TRIG_ORDER = {NONE: 0, COS: 1, SIN: 2}

SIG_TOL = 1e-12     # absolute tolerance on rates, frequencies and piece starts
COEF_TOL = 1e-12    # relative tolerance on coefficients
RANGE_GRID = 4096   # grid points per transcendental piece in range_info


@dataclass(frozen=True, order=False)
class ExpPolyTerm:
    coeff: float
    tpow: int = 0
    rate: float = 0.0
    freq: float = 0.0
    trig: str = NONE

    def __post_init__(self):
        if self.trig not in _TRIG_ORDER:
            raise ValueError(f"unknown trig kind {self.trig!r}")
        if self.tpow < 0 or int(self.tpow) != self.tpow:
            raise ValueError("tpow must be a nonnegative integer")
        if self.trig == NONE and self.freq != 0.0:
            raise ValueError("a term without trig factor must have freq 0")
        if self.trig != NONE and not self.freq > 0.0:
            raise ValueError("a trig term needs freq > 0")
        if not (math.isfinite(self.coeff) and math.isfinite(self.rate)):
            raise ValueError("coefficients and rates must be finite")

    @property
    def signature(self) -> tuple:
        return (self.tpow, self.rate, self.freq, _TRIG_ORDER[self.trig])

    @property
    def is_polynomial(self) -> bool:
        return self.rate == 0.0 and self.trig == NONE

    def __call__(self, t):
        v = self.coeff * np.power(t, self.tpow) if self.tpow else self.coeff * np.ones_like(t, dtype=float)
        if self.rate:
            v = v * np.exp(self.rate * np.asarray(t, dtype=float))
        if self.trig == COS:
            v = v * np.cos(self.freq * np.asarray(t, dtype=float))
        elif self.trig == SIN:
            v = v * np.sin(self.freq * np.asarray(t, dtype=float))
        return v

    def scaled(self, c: float) -> "ExpPolyTerm":
        return ExpPolyTerm(self.coeff * c, self.tpow, self.rate, self.freq, self.trig)


Terms = tuple  # tuple[ExpPolyTerm, ...], canonical


def term(coeff: float, tpow: int = 0, rate: float = 0.0, freq: float = 0.0,
         trig: str = NONE) -> ExpPolyTerm:
    """Build a term, folding ``freq <= 0`` and ``freq == 0`` into canonical form.

    Returns ``None`` for the zero term ``sin(0 t)``.
    """
    if trig != NONE:
        if freq < 0:
            freq = -freq
            if trig == SIN:
                coeff = -coeff
        if freq == 0.0:
            if trig == SIN:
                return None
            trig = NONE
    else:
        freq = 0.0
    return ExpPolyTerm(float(coeff), int(tpow), float(rate), float(freq), trig)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= SIG_TOL


def normalize_terms(terms: Iterable[Optional[ExpPolyTerm]]) -> Terms:
    """Merge duplicate signatures, drop cancelled terms, sort canonically."""
    ts = [t for t in terms if t is not None and t.coeff != 0.0]
    ts.sort(key=lambda t: (t.tpow, _TRIG_ORDER[t.trig], t.rate, t.freq))
    groups: list[list[ExpPolyTerm]] = []
    for t in ts:
        home = None
        for g in reversed(groups):
            h = g[0]
            if h.tpow != t.tpow or h.trig != t.trig:
                break
            if _close(h.rate, t.rate) and _close(h.freq, t.freq):
                home = g
                break
        if home is None:
            groups.append([t])
        else:
            home.append(t)
    out = []
    for g in groups:
        total = math.fsum(t.coeff for t in g)
        mag = sum(abs(t.coeff) for t in g)
        if total == 0.0 or abs(total) <= COEF_TOL * mag and len(g) > 1:
            continue
        h = g[0]
        out.append(ExpPolyTerm(total, h.tpow, h.rate, h.freq, h.trig))
    out.sort(key=lambda t: t.signature)
    return tuple(out)


def terms_close(a: Sequence[ExpPolyTerm], b: Sequence[ExpPolyTerm], rel: float = COEF_TOL) -> bool:
    """Structural equality of canonical term lists within tolerance."""
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if x.tpow != y.tpow or x.trig != y.trig:
            return False
        if not (_close(x.rate, y.rate) and _close(x.freq, y.freq)):
            return False
        if abs(x.coeff - y.coeff) > rel * max(abs(x.coeff), abs(y.coeff)):
            return False
    return True


def eval_terms(terms: Sequence[ExpPolyTerm], t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for tm in terms:
        out = out + tm(t)
    return out


# -- complex-exponential route for products ---------------------------------

def _to_complex(t: ExpPolyTerm) -> list[tuple[complex, int, complex]]:
    if t.trig == NONE:
        return [(complex(t.coeff), t.tpow, complex(t.rate))]
    zp = complex(t.rate, t.freq)
    zm = complex(t.rate, -t.freq)
    if t.trig == COS:
        return [(t.coeff / 2, t.tpow, zp), (t.coeff / 2, t.tpow, zm)]
    return [(t.coeff / 2j, t.tpow, zp), (-t.coeff / 2j, t.tpow, zm)]


def _from_complex(atoms: Iterable[tuple[complex, int, complex]]) -> Terms:
    keys: list[tuple[int, complex]] = []
    sums: list[complex] = []
    for c, k, z in atoms:
        for i, (k2, z2) in enumerate(keys):
            if k2 == k and _close(z.real, z2.real) and _close(z.imag, z2.imag):
                sums[i] += c
                break
        else:
            keys.append((k, z))
            sums.append(c)
    out = []
    used = [False] * len(keys)
    for i, ((k, z), c) in enumerate(zip(keys, sums)):
        if used[i]:
            continue
        used[i] = True
        if abs(z.imag) <= SIG_TOL:
            out.append(term(c.real, k, z.real))
            continue
        partner = None
        for j in range(i + 1, len(keys)):
            k2, z2 = keys[j]
            if not used[j] and k2 == k and _close(z2.real, z.real) and _close(z2.imag, -z.imag):
                partner = sums[j]
                used[j] = True
                break
        # C multiplies e^{(b+iw)t}; its partner (if any) multiplies e^{(b-iw)t}
        if z.imag > 0:
            cp, cm = c, partner
        else:
            cp, cm, z = partner, c, z.conjugate()
        if cp is None:
            C = cm.conjugate()
        elif cm is None:
            C = cp
        else:
            C = (cp + cm.conjugate()) / 2
        out.append(term(2 * C.real, k, z.real, z.imag, COS))
        out.append(term(-2 * C.imag, k, z.real, z.imag, SIN))
    return normalize_terms(out)


def multiply_terms(a: Sequence[ExpPolyTerm], b: Sequence[ExpPolyTerm]) -> Terms:
    if not a or not b:
        return ()
    ca = [x for t in a for x in _to_complex(t)]
    cb = [x for t in b for x in _to_complex(t)]
    return _from_complex((c1 * c2, k1 + k2, z1 + z2) for c1, k1, z1 in ca for c2, k2, z2 in cb)


def power_terms(terms: Sequence[ExpPolyTerm], k: int) -> Terms:
    if k < 1:
        raise ValueError("power must be a positive integer")
    result: Optional[Terms] = None
    base = normalize_terms(terms)
    while k:
        if k & 1:
            result = base if result is None else multiply_terms(result, base)
        k >>= 1
        if k:
            base = multiply_terms(base, base)
    return result


def scale_terms(terms: Sequence[ExpPolyTerm], c: float) -> Terms:
    if c == 0.0:
        return ()
    return normalize_terms(t.scaled(c) for t in terms)


def shift_terms(terms: Sequence[ExpPolyTerm], d: float) -> Terms:
    """Terms of ``t -> f(t - d)`` written again in powers of ``t``."""
    if d == 0.0:
        return tuple(terms)
    out = []
    for tm in terms:
        decay = math.exp(-tm.rate * d)
        if tm.trig == NONE:
            trig_parts = [(1.0, NONE)]
        else:
            cw, sw = math.cos(tm.freq * d), math.sin(tm.freq * d)
            if tm.trig == COS:
                trig_parts = [(cw, COS), (sw, SIN)]
            else:
                trig_parts = [(cw, SIN), (-sw, COS)]
        for j in range(tm.tpow + 1):
            binom = comb(tm.tpow, j) * (-d) ** (tm.tpow - j)
            for w, kind in trig_parts:
                c = tm.coeff * decay * binom * w
                if c != 0.0:
                    out.append(term(c, j, tm.rate, tm.freq, kind))
    return normalize_terms(out)


def derivative_terms(terms: Sequence[ExpPolyTerm]) -> Terms:
    out = []
    for tm in terms:
        if tm.tpow:
            out.append(term(tm.coeff * tm.tpow, tm.tpow - 1, tm.rate, tm.freq, tm.trig))
        if tm.rate:
            out.append(term(tm.coeff * tm.rate, tm.tpow, tm.rate, tm.freq, tm.trig))
        if tm.trig == COS:
            out.append(term(-tm.coeff * tm.freq, tm.tpow, tm.rate, tm.freq, SIN))
        elif tm.trig == SIN:
            out.append(term(tm.coeff * tm.freq, tm.tpow, tm.rate, tm.freq, COS))
    return normalize_terms(out)


def taylor_terms(terms: Sequence[ExpPolyTerm], order: int) -> list[float]:
    """Taylor coefficients at t = 0 of a finite term sum, up to ``t**order``."""
    res = [0.0] * (order + 1)
    for tm in terms:
        z = complex(tm.rate, tm.freq)
        for i in range(tm.tpow, order + 1):
            j = i - tm.tpow
            w = z ** j / factorial(j)
            res[i] += tm.coeff * (w.imag if tm.trig == SIN else w.real)
    return res


def is_polynomial_terms(terms: Sequence[ExpPolyTerm]) -> bool:
    return all(t.is_polynomial for t in terms)


def poly_coeffs(terms: Sequence[ExpPolyTerm]) -> np.ndarray:
    deg = max((t.tpow for t in terms), default=0)
    c = np.zeros(deg + 1)
    for t in terms:
        c[t.tpow] += t.coeff
    return c


# -- pieces and functions -----------------------------------------------------

@dataclass(frozen=True)
class Piece:
    start: float
    terms: Terms = ()

    def __post_init__(self):
        if not (self.start >= 0.0 and math.isfinite(self.start)):
            raise ValueError("piece start must be a finite nonnegative real")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "terms", normalize_terms(self.terms))


@dataclass(frozen=True)
class PiecewiseExpPoly:
    """Function on [0, inf) given by right-open pieces of exp-poly-trig sums.

    Construction canonicalizes: starts closer than ``SIG_TOL`` are merged
    (the later piece wins) and neighbouring pieces with equal term lists are
    fused, so structurally equal functions compare equal.
    """

    pieces: tuple

    def __post_init__(self):
        ps = [p if isinstance(p, Piece) else Piece(*p) for p in self.pieces]
        if not ps:
            raise ValueError("a function needs at least one piece")
        ps.sort(key=lambda p: p.start)
        if ps[0].start > SIG_TOL:
            raise ValueError("the first piece must start at 0")
        merged: list[Piece] = []
        for p in ps:
            if merged and p.start - merged[-1].start <= SIG_TOL:
                start = merged[-1].start
                merged[-1] = Piece(start, p.terms)
            else:
                merged.append(p)
        merged[0] = Piece(0.0, merged[0].terms)
        fused = [merged[0]]
        for p in merged[1:]:
            if terms_close(fused[-1].terms, p.terms):
                continue
            fused.append(p)
        object.__setattr__(self, "pieces", tuple(fused))

    # construction helpers
    @classmethod
    def from_terms(cls, terms: Iterable[ExpPolyTerm]) -> "PiecewiseExpPoly":
        return cls((Piece(0.0, tuple(terms)),))

    @classmethod
    def constant(cls, c: float) -> "PiecewiseExpPoly":
        return cls.from_terms([term(c)] if c else [])

    @classmethod
    def indicator(cls, lo: float, hi: float = math.inf, value: float = 1.0) -> "PiecewiseExpPoly":
        """``value`` on ``[lo, hi)``, zero elsewhere."""
        pieces = [Piece(0.0, ())]
        pieces.append(Piece(lo, (term(value),)))
        if math.isfinite(hi):
            pieces.append(Piece(hi, ()))
        return cls(tuple(pieces))

    @property
    def starts(self) -> list[float]:
        return [p.start for p in self.pieces]

    def bounds(self) -> list[tuple[float, float, Terms]]:
        """``(start, end, terms)`` per piece, the last with ``end = inf``."""
        s = self.starts
        ends = s[1:] + [math.inf]
        return [(a, b, p.terms) for a, b, p in zip(s, ends, self.pieces)]

    def piece_at(self, t: float) -> Piece:
        return self.pieces[_bisect.bisect_right(self.starts, t) - 1]

    def __call__(self, t):
        if np.ndim(t) == 0:
            return float(eval_terms(self.piece_at(float(t)).terms, float(t)))
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(np.asarray(self.starts), t, side="right") - 1
        out = np.zeros_like(t)
        for k, p in enumerate(self.pieces):
            mask = idx == k
            if mask.any() and p.terms:
                out[mask] = eval_terms(p.terms, t[mask])
        return out

    @property
    def sigma(self) -> float:
        """Growth abscissa: the max rate in the unbounded piece (``-inf`` if empty)."""
        last = self.pieces[-1].terms
        return max((t.rate for t in last), default=-math.inf)

    @property
    def is_zero(self) -> bool:
        return len(self.pieces) == 1 and not self.pieces[0].terms

    # arithmetic
    def _combine(self, other: "PiecewiseExpPoly", op) -> "PiecewiseExpPoly":
        starts = sorted(set(self.starts) | set(other.starts))
        return PiecewiseExpPoly(tuple(
            Piece(s, op(self.piece_at(s).terms, other.piece_at(s).terms)) for s in starts))

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = PiecewiseExpPoly.constant(other)
        return self._combine(other, lambda a, b: normalize_terms(a + b))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = PiecewiseExpPoly.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        return self._combine(other, multiply_terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return power(self, k)

    def scale(self, c: float) -> "PiecewiseExpPoly":
        return PiecewiseExpPoly(tuple(Piece(p.start, scale_terms(p.terms, c)) for p in self.pieces))

    def restrict(self, lo: float, hi: float = math.inf) -> "PiecewiseExpPoly":
        """This function times the indicator of ``[lo, hi)``."""
        return self * PiecewiseExpPoly.indicator(lo, hi)

    def almost_equal(self, other: "PiecewiseExpPoly", rel: float = COEF_TOL) -> bool:
        if len(self.pieces) != len(other.pieces):
            return False
        return all(abs(a.start - b.start) <= SIG_TOL and terms_close(a.terms, b.terms, rel)
                   for a, b in zip(self.pieces, other.pieces))

    def __repr__(self):
        from .dsl import format_function
        return f"PiecewiseExpPoly({format_function(self)!r})"


def evaluate(f: PiecewiseExpPoly, t: float) -> float:
    if t < 0:
        raise ValueError("functions are defined on [0, inf)")
    return f(t)


def power(f: PiecewiseExpPoly, k: int) -> PiecewiseExpPoly:
    """Pointwise ``f**k`` in canonical term form."""
    if k < 1:
        raise ValueError("power must be a positive integer")
    return PiecewiseExpPoly(tuple(
        Piece(p.start, power_terms(p.terms, k) if p.terms else ()) for p in f.pieces))


def concat(F: PiecewiseExpPoly, G: PiecewiseExpPoly, T: float) -> PiecewiseExpPoly:
    """``F(t) + G(t - T) 1_[T, inf)(t)`` for a head ``F`` that vanishes on ``[T, inf)``."""
    if not T > 0:
        raise ValueError("junction time must be positive")
    for a, b, terms in F.bounds():
        if b > T + SIG_TOL and terms:
            raise NonVanishingHead(f"head has nonzero terms on [{max(a, T)}, {b}) past T={T}")
    pieces = [Piece(p.start, p.terms) for p in F.pieces if p.start < T - SIG_TOL]
    pieces += [Piece(T + p.start, shift_terms(p.terms, T)) for p in G.pieces]
    return PiecewiseExpPoly(tuple(pieces))


def tail_at(f: PiecewiseExpPoly, T: float) -> PiecewiseExpPoly:
    """The shifted function ``t -> f(t + T)``."""
    if T < 0:
        raise ValueError("shift must be nonnegative")
    if T == 0:
        return f
    pieces = []
    for a, b, terms in f.bounds():
        if b <= T + SIG_TOL:
            continue
        pieces.append(Piece(max(a - T, 0.0), shift_terms(terms, -T)))
    return PiecewiseExpPoly(tuple(pieces))


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor coefficients ``coeffs[i]`` of ``t**i``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("a power series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def leading_index(self, tol: float = 0.0) -> Optional[int]:
        """Index of the first coefficient with magnitude above ``tol``."""
        for i, c in enumerate(self.coeffs):
            if abs(c) > tol:
                return i
        return None


def taylor_at_zero(f: PiecewiseExpPoly, N: int) -> PowerSeries:
    return PowerSeries(taylor_terms(f.pieces[0].terms, N))


def first_divergence(p: PiecewiseExpPoly, q: PiecewiseExpPoly, order: int = 20) -> Optional[float]:
    """``inf {t >= 0 : p(t) != q(t)}``, or ``None`` when ``p == q``."""
    starts = sorted(set(p.starts) | set(q.starts))
    ends = starts[1:] + [math.inf]
    for s, e in zip(starts, ends):
        a, b = p.piece_at(s).terms, q.piece_at(s).terms
        if terms_close(a, b):
            continue
        diff = normalize_terms(a + tuple(t.scaled(-1.0) for t in b))
        if not diff:
            continue
        scale = max(abs(t.coeff) for t in a + b)
        local = shift_terms(diff, -s)
        zmax = max(abs(complex(t.rate, t.freq)) for t in local)
        coeffs = taylor_terms(local, order)
        if any(abs(c) * factorial(i) > 1e-10 * scale * (1.0 + zmax) ** i for i, c in enumerate(coeffs)):
            return s
        # Analytically zero to the checked order; locate the first visible gap.
        hi = e if math.isfinite(e) else s + 50.0
        ts = np.linspace(s, hi, 2001)
        vis = np.nonzero(np.abs(eval_terms(diff, ts)) > 1e-9 * scale)[0]
        if vis.size:
            return float(ts[max(vis[0] - 1, 0)])
    return None


@dataclass(frozen=True)
class RangeInfo:
    """Infimum/supremum of a function over an open interval.

    ``*_attained`` is False when the extreme value is only a limit (at an
    excluded endpoint, a jump, or infinity). Witness ``inf`` marks the limit
    ``t -> inf``.
    """

    inf_value: float
    sup_value: float
    inf_witness: float
    sup_witness: float
    certified: bool
    inf_attained: bool = True
    sup_attained: bool = True


def _asymptotic_limits(terms: Terms) -> tuple[list, bool]:
    """Limit candidates as ``t -> inf`` for an unbounded piece.

    Returns (candidates, bounded) where candidates are ``(value, inf, False)``.
    """
    if not terms:
        return [(0.0, math.inf, False)], True
    rmax = max(t.rate for t in terms)
    top = [t for t in terms if _close(t.rate, rmax)]
    kmax = max(t.tpow for t in top)
    dominant = [t for t in top if t.tpow == kmax]
    if rmax > SIG_TOL or (kmax > 0 and rmax >= -SIG_TOL):
        if all(t.trig == NONE for t in dominant):
            sign = math.copysign(1.0, sum(t.coeff for t in dominant))
            return [(sign * math.inf, math.inf, False)], False
        return [(math.inf, math.inf, False), (-math.inf, math.inf, False)], False
    if rmax < -SIG_TOL:
        return [(0.0, math.inf, False)], True
    # rate-0, tpow-0 dominant part: a constant plus bounded oscillation
    const = sum(t.coeff for t in dominant if t.trig == NONE)
    if all(t.trig == NONE for t in dominant):
        return [(const, math.inf, False)], True
    return [], True


def _horizon(terms: Terms, start: float) -> float:
    span = 10.0 * (1 + max((t.tpow for t in terms), default=0))
    for t in terms:
        if t.rate:
            span = max(span, 40.0 / abs(t.rate))
        if t.freq:
            span = max(span, 8 * math.pi / t.freq)
    return start + min(span, 1e4)


def _piece_candidates(terms: Terms, a: float, b: float, a_open: bool, b_open: bool,
                      grid: int) -> tuple[list, bool]:
    """Extreme-value candidates ``(value, t, attained)`` of one piece on [a, b]."""
    cands = []
    unbounded = math.isinf(b)
    if not terms:
        cands.append((0.0, a, not a_open))
        if b > a:
            cands.append((0.0, a if math.isinf(b) else 0.5 * (a + b), True))
        return cands, True
    fa = float(eval_terms(terms, a))
    cands.append((fa, a, not a_open))
    if is_polynomial_terms(terms):
        c = poly_coeffs(terms)
        if c.size == 1 or not np.any(c[1:]):
            cands.append((float(c[0]), a + 1.0 if unbounded else 0.5 * (a + b), True))
            return cands, True
        dc = np.polynomial.polynomial.polyder(c)
        hi = max(a, cauchy_bound(dc)) + 1.0 if unbounded else b
        for x in real_roots(dc, a, hi):
            if a < x < b:
                cands.append((float(np.polynomial.polynomial.polyval(x, c)), x, True))
        if unbounded:
            lead = c[np.nonzero(c)[0][-1]]
            cands.append((math.copysign(math.inf, lead), math.inf, False))
        else:
            cands.append((float(np.polynomial.polynomial.polyval(b, c)), b, not b_open))
        return cands, True
    if unbounded:
        lim, _ = _asymptotic_limits(terms)
        cands.extend(lim)
        hi = _horizon(terms, a)
    else:
        hi = b
        cands.append((float(eval_terms(terms, b)), b, not b_open))
    ts = np.linspace(a, hi, grid)
    vals = eval_terms(terms, ts)
    interior = slice(1, grid - 1) if not unbounded else slice(1, grid)
    idx_min = int(np.argmin(vals[interior])) + 1
    idx_max = int(np.argmax(vals[interior])) + 1
    cands.append((float(vals[idx_min]), float(ts[idx_min]), True))
    cands.append((float(vals[idx_max]), float(ts[idx_max]), True))
    dterms = derivative_terms(terms)
    dvals = eval_terms(dterms, ts)
    sgn = np.sign(dvals)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]

    def df(x):
        return float(eval_terms(dterms, x))

    for i in flips:
        x = bisect(df, float(ts[i]), float(ts[i + 1]))
        if a < x < b:
            cands.append((float(eval_terms(terms, x)), x, True))
    return cands, False


def _extreme(cands, pick_min: bool):
    key = min if pick_min else max
    best = key(v for v, _, _ in cands)
    if math.isinf(best):
        ties = [c for c in cands if c[0] == best]
    else:
        tol = 1e-12 * max(1.0, abs(best))
        ties = [c for c in cands if abs(c[0] - best) <= tol]
    att = [c for c in ties if c[2]]
    chosen = att[0] if att else ties[0]
    return best, chosen[1], bool(att)


def range_info(f: PiecewiseExpPoly, t_lo: float = 0.0, t_hi: float = math.inf,
               grid: int = RANGE_GRID) -> RangeInfo:
    """inf and sup of ``f`` over the open interval ``(t_lo, t_hi)``.

    Pure-polynomial pieces are handled exactly through root isolation of the
    derivative; other pieces are scanned on a ``grid``-point mesh per piece
    and refined by bisection on the derivative, and the result is flagged as
    not certified.
    """
    if not (0 <= t_lo < t_hi):
        raise ValueError("need 0 <= t_lo < t_hi")
    cands = []
    certified = True
    for a, b, terms in f.bounds():
        lo, hi = max(a, t_lo), min(b, t_hi)
        if lo >= hi:
            continue
        a_open = lo == t_lo
        b_open = True  # piece end is excluded or is the open bound t_hi
        c, cert = _piece_candidates(terms, lo, hi, a_open, b_open, grid)
        cands.extend(c)
        certified = certified and cert
    inf_v, inf_w, inf_att = _extreme(cands, True)
    sup_v, sup_w, sup_att = _extreme(cands, False)
    return RangeInfo(inf_v, sup_v, inf_w, sup_w, certified, inf_att, sup_att)


def piece_ranges(f: PiecewiseExpPoly, t_lo: float = 0.0, t_hi: float = math.inf,
                 grid: int = RANGE_GRID) -> list[RangeInfo]:
    """range_info restricted to each piece's share of ``(t_lo, t_hi)``."""
    out = []
    for a, b, _ in f.bounds():
        lo, hi = max(a, t_lo), min(b, t_hi)
        if lo < hi:
            out.append(_single_piece_range(f, a, lo, hi, t_lo, grid))
    return out


def _single_piece_range(f, a, lo, hi, t_lo, grid) -> RangeInfo:
    terms = f.piece_at(a).terms
    c, cert = _piece_candidates(terms, lo, hi, lo == t_lo, True, grid)
    inf_v, inf_w, inf_att = _extreme(c, True)
    sup_v, sup_w, sup_att = _extreme(c, False)
    return RangeInfo(inf_v, sup_v, inf_w, sup_w, cert, inf_att, sup_att)
