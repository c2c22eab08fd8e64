import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import functions, random_function
from laplace_ident.counterex import gen_preset
from laplace_ident.errors import NonVanishingHead
from laplace_ident.fnmodel import (COS, SIN, ExpPolyTerm, Piece, PiecewiseExpPoly, concat,
                                   eval_terms, evaluate, first_divergence, power, range_info,
                                   tail_at, taylor_at_zero, term)
from laplace_ident.series import power_coeffs

ONE = PiecewiseExpPoly.constant(1.0)
T_ = PiecewiseExpPoly.from_terms([term(1.0, 1)])
EXP_NEG = PiecewiseExpPoly.from_terms([term(1.0, 0, -1.0)])
SIN_T = PiecewiseExpPoly.from_terms([term(1.0, 0, 0.0, 1.0, SIN)])
BOX = PiecewiseExpPoly.indicator(0.0, 1.0)
THM12B_Q = T_ - PiecewiseExpPoly.indicator(1.0, value=2.0)


def majorant(f, t, k=1):
    """Sum of absolute term magnitudes at t, to the k-th power: the natural error scale."""
    terms = f.piece_at(t).terms
    m = sum(abs(x.coeff) * t ** x.tpow * math.exp(x.rate * t) for x in terms)
    return m ** k


# -- terms and construction --------------------------------------------------------

def test_term_invariants():
    with pytest.raises(ValueError):
        ExpPolyTerm(1.0, 0, 0.0, 1.0, "none")
    with pytest.raises(ValueError):
        ExpPolyTerm(1.0, 0, 0.0, 0.0, COS)
    assert term(2.0, 0, 0.0, -3.0, SIN) == ExpPolyTerm(-2.0, 0, 0.0, 3.0, SIN)
    assert term(1.0, 0, 0.0, 0.0, SIN) is None
    assert term(1.0, 0, 0.0, 0.0, COS).trig == "none"


def test_duplicate_signatures_merge():
    p = Piece(0.0, (term(1.0, 1), term(2.0, 1), term(-3.0, 1), term(1.0)))
    assert p.terms == (term(1.0),)


def test_first_piece_must_start_at_zero():
    with pytest.raises(ValueError):
        PiecewiseExpPoly((Piece(1.0, (term(1.0),)),))


def test_nearby_starts_merge():
    f = PiecewiseExpPoly((Piece(0.0, (term(1.0),)), Piece(math.log(4) + math.log(1.5), ()),
                          Piece(math.log(6), (term(2.0),))))
    assert len(f.pieces) == 2 and f(10.0) == 2.0


# -- evaluation ---------------------------------------------------------------------

def test_eval_examples():
    assert evaluate(BOX, 0.5) == 1.0 and evaluate(BOX, 2.0) == 0.0
    assert evaluate(EXP_NEG, 0.0) == 1.0
    assert abs(evaluate(SIN_T, math.pi / 2) - 1.0) < 1e-15


def test_eval_rejects_negative_time():
    with pytest.raises(ValueError):
        evaluate(ONE, -1.0)


def test_vectorized_eval_matches_scalar():
    f = random_function(np.random.default_rng(3))
    ts = np.linspace(0, 4, 57)
    assert np.allclose(f(ts), [f(float(t)) for t in ts], rtol=0, atol=1e-14)


# -- powers -------------------------------------------------------------------------

def test_pow_examples():
    assert power(BOX, 5) == BOX
    assert power(EXP_NEG, 2) == PiecewiseExpPoly.from_terms([term(1.0, 0, -2.0)])
    sq = power(SIN_T, 2)
    expected = PiecewiseExpPoly.from_terms([term(0.5), term(-0.5, 0, 0.0, 2.0, COS)])
    assert sq.almost_equal(expected, 1e-15)
    ts = np.random.default_rng(0).uniform(0, 20, 100)
    assert np.allclose(sq(ts), np.sin(ts) ** 2, rtol=0, atol=1e-14)


def test_sin_cubed_linearizes():
    cube = power(SIN_T, 3)
    expected = PiecewiseExpPoly.from_terms([term(0.75, 0, 0.0, 1.0, SIN), term(-0.25, 0, 0.0, 3.0, SIN)])
    assert cube.almost_equal(expected, 1e-15)


@given(functions(max_terms=2), st.integers(1, 6), st.floats(0.0, 5.0))
@settings(max_examples=80, deadline=None)
def test_pow_matches_pointwise_power(f, k, t):
    got = power(f, k)(t)
    want = f(t) ** k
    assert abs(got - want) <= 1e-10 * (1 + majorant(f, t, k))


# -- concatenation and tails -----------------------------------------------------------

def test_concat_examples():
    F = T_.restrict(0.0, 1.0)
    G = T_ + 1.0
    assert concat(F, G, 1.0) == T_
    g = random_function(np.random.default_rng(5))
    shifted = concat(PiecewiseExpPoly.constant(0.0), g, 1.0)
    ts = np.linspace(1.0, 6.0, 101)
    assert np.allclose(shifted(ts), g(ts - 1.0), rtol=1e-12, atol=1e-12)
    assert shifted(0.5) == 0.0
    F = EXP_NEG.restrict(0.0, math.log(2))
    q = concat(F, PiecewiseExpPoly.constant(0.5), math.log(2))
    assert q.almost_equal(gen_preset("thm11a").q)


def test_concat_rejects_nonvanishing_head():
    with pytest.raises(NonVanishingHead):
        concat(T_, ONE, 1.0)


def test_tail_examples():
    f = random_function(np.random.default_rng(6))
    assert tail_at(f, 0.0) == f
    assert tail_at(THM12B_Q, 1.0).almost_equal(T_ - 1.0)
    half = PiecewiseExpPoly.from_terms([term(0.5, 0, -1.0)])
    assert tail_at(EXP_NEG, math.log(2)).almost_equal(half, 1e-15)


@given(functions(), st.floats(0.1, 3.0))
@settings(max_examples=60, deadline=None)
def test_concat_of_head_and_tail_restores(p, T):
    q = concat(p.restrict(0.0, T), tail_at(p, T), T)
    for t in np.linspace(0.0, 6.0, 301):
        assert abs(q(t) - p(t)) <= 1e-12 * (1 + majorant(p, t))


# -- Taylor series ----------------------------------------------------------------

def test_taylor_examples():
    assert np.allclose(taylor_at_zero(EXP_NEG, 3).coeffs, [1, -1, 0.5, -1 / 6], rtol=1e-15)
    assert list(taylor_at_zero(THM12B_Q, 2).coeffs) == [0.0, 1.0, 0.0]
    assert np.allclose(taylor_at_zero(SIN_T, 3).coeffs, [0, 1, 0, -1 / 6], rtol=1e-15, atol=0)


@given(functions(max_terms=2), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_taylor_of_power_is_cauchy_power(f, k):
    N = 6
    direct = taylor_at_zero(power(f, k), N).coeffs
    via = power_coeffs(taylor_at_zero(f, N), k).coeffs
    scale = max(1.0, max(abs(x) for x in via))
    assert all(abs(a - b) <= 1e-10 * scale for a, b in zip(direct, via))


# -- first divergence -----------------------------------------------------------

def test_first_divergence_examples():
    assert first_divergence(T_, THM12B_Q) == 1.0
    assert first_divergence(T_, T_) is None
    assert first_divergence(ONE, BOX) == 1.0


def test_first_divergence_on_sign_flip_is_zero():
    assert first_divergence(EXP_NEG, -EXP_NEG) == 0.0


@given(functions(), functions())
@settings(max_examples=60, deadline=None)
def test_first_divergence_symmetric(p, q):
    assert first_divergence(p, q) == first_divergence(q, p)
    assert first_divergence(p, p) is None


# -- ranges -----------------------------------------------------------------------

def test_range_examples():
    p = gen_preset("thm11a", c=0.75).p
    info = range_info(p)
    assert abs(info.inf_value - 0.25) < 1e-12
    assert not info.inf_attained
    assert abs(info.inf_witness - math.log(4)) < 1e-12
    one = range_info(ONE)
    assert one.inf_value == one.sup_value == 1.0 and one.certified
    s = range_info(SIN_T)
    assert abs(s.inf_value + 1) < 1e-12 and abs(s.sup_value - 1) < 1e-12


def test_range_unbounded_growth():
    info = range_info(PiecewiseExpPoly.from_terms([term(1.0, 0, 2.0)]))
    assert info.sup_value == math.inf and abs(info.inf_value - 1.0) < 1e-15
    assert not info.inf_attained


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6))
@settings(max_examples=25, deadline=None)
def test_polynomial_range_matches_brute_force(coeffs):
    terms = tuple(t for i, c in enumerate(coeffs) if c for t in [term(c, i)])
    f = PiecewiseExpPoly((Piece(0.0, terms), Piece(3.0, ())))
    info = range_info(f, 0.0, 3.0)
    xs = np.linspace(0.0, 3.0, 10 ** 6)
    ys = eval_terms(terms, xs) if terms else np.zeros_like(xs)
    assert info.certified
    assert abs(info.inf_value - ys.min()) <= 1e-8 * (1 + abs(ys.min()))
    assert abs(info.sup_value - ys.max()) <= 1e-8 * (1 + abs(ys.max()))


@given(functions())
@settings(max_examples=40, deadline=None)
def test_range_witness_is_consistent(f):
    info = range_info(f, 0.0, 5.0)
    assert info.inf_value <= info.sup_value
    if info.inf_attained and math.isfinite(info.inf_witness):
        assert abs(f(info.inf_witness) - info.inf_value) <= 1e-9 * (1 + abs(info.inf_value))
    xs = np.linspace(0.001, 4.999, 2001)
    ys = f(xs)
    assert ys.min() >= info.inf_value - 1e-9 * (1 + abs(info.inf_value))
    assert ys.max() <= info.sup_value + 1e-9 * (1 + abs(info.sup_value))
