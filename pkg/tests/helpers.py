"""Random function generators shared by the test modules."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from laplace_ident.fnmodel import COS, NONE, SIN, Piece, PiecewiseExpPoly, term


def _rand_term(rng, rate_range=(-2.0, 1.0), max_tpow=2):
    trig = rng.choice([NONE, NONE, COS, SIN])
    freq = 0.0 if trig == NONE else float(rng.uniform(0.5, 3.0))
    return term(float(rng.uniform(-2, 2)), int(rng.integers(0, max_tpow + 1)),
                float(rng.uniform(*rate_range)), freq, str(trig))


def random_function(rng, max_pieces=3, max_terms=3, rate_range=(-2.0, 1.0), max_tpow=2):
    """A random piecewise function whose first piece is nonzero."""
    k = int(rng.integers(1, max_pieces + 1))
    starts = [0.0] + sorted(float(x) for x in rng.uniform(0.2, 3.0, size=k - 1))
    pieces = []
    for i, s in enumerate(starts):
        n_terms = int(rng.integers(1 if i == 0 else 0, max_terms + 1))
        pieces.append(Piece(s, tuple(_rand_term(rng, rate_range, max_tpow) for _ in range(n_terms))))
    f = PiecewiseExpPoly(tuple(pieces))
    if not f.pieces[0].terms:
        return random_function(rng, max_pieces, max_terms, rate_range, max_tpow)
    return f


def random_positive(rng, max_pieces=3):
    """Strictly positive on [0, inf): a constant in [1, 2] plus bounded wiggles."""
    k = int(rng.integers(1, max_pieces + 1))
    starts = [0.0] + sorted(float(x) for x in rng.uniform(0.2, 3.0, size=k - 1))
    pieces = []
    for s in starts:
        terms = [term(float(rng.uniform(1.0, 2.0)))]
        terms.append(term(float(rng.uniform(-0.4, 0.4)), 0, float(rng.uniform(-2.0, 0.0))))
        if rng.random() < 0.5:
            terms.append(term(float(rng.uniform(-0.3, 0.3)), 0, -1.0, float(rng.uniform(0.5, 2.0)), COS))
        pieces.append(Piece(s, tuple(terms)))
    return PiecewiseExpPoly(tuple(pieces))


@st.composite
def functions(draw, max_pieces=3, max_terms=3):
    """Hypothesis strategy: seed a numpy generator and build a random function."""
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_function(np.random.default_rng(seed), max_pieces, max_terms)


@st.composite
def positive_functions(draw, max_pieces=3):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_positive(np.random.default_rng(seed), max_pieces)


coprime_pairs = st.sampled_from([(2, 1), (3, 1), (3, 2), (4, 1), (4, 3), (5, 2), (5, 3)])


def grid_close(f, g, ts, rel=1e-12):
    a, b = f(ts), g(ts)
    return bool(np.all(np.abs(a - b) <= rel * (1 + np.abs(a))))


def lin(lo, hi, n):
    return np.linspace(lo, hi, n)


TWO_PI = 2 * math.pi

ACCEPTANCE_LINES: list = []  # filled by the acceptance suite, printed in the terminal summary
