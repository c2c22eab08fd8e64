import math

import numpy as np
import pytest

from laplace_ident.counterex import (COUNTEREXAMPLES, FAMILIES, exp_member, family_classify,
                                     gen_preset, solve_c, special_times, const_tail_member)
from laplace_ident.errors import BadParams
from laplace_ident.fnmodel import PiecewiseExpPoly, term
from laplace_ident.ratio import EQUAL, h_equal


def test_thm11a_layout():
    p, q, n, m = gen_preset("thm11a", c=0.75)
    assert np.allclose(p.starts, [0, math.log(4), math.log(4) + math.log(1.5)], atol=1e-15)
    assert np.allclose(q.starts, [0, math.log(2)], atol=1e-15)
    assert (n, m) == (2, 1)


def test_thm12a_layout():
    p, q, n, m = gen_preset("thm12a", n=3, m=2)
    assert (n, m) == (3, 2)
    assert len(p.pieces) == 1 and abs(p(1.0) - math.sin(1.0)) < 1e-15
    assert np.allclose(q.starts, [0, 2 * math.pi]) and not q.pieces[1].terms


def test_thm11d_layout():
    p, q, n, m = gen_preset("thm11d")
    assert (n, m) == (3, 1)
    T1 = math.log(2) - 0.5 * math.log(3)
    assert abs(q.starts[1] - T1) < 1e-15
    assert abs(q(5.0) + 3 ** -0.5) < 1e-15


def test_thm12b_layout():
    p, q, n, m = gen_preset("thm12b")
    assert list(q.starts) == [0.0, 1.0]
    assert abs(q(2.0) - 0.0) < 1e-15 and abs(q(0.5) - 0.5) < 1e-15


@pytest.mark.parametrize("family,params", [
    ("thm11a", {"c": 0.5}), ("thm11a", {"c": 1.0}), ("thm11a", {"n": 3, "m": 1}),
    ("thm11b", {"n": 4, "m": 2}), ("thm11b", {"n": 1, "m": 2}), ("thm11c", {"n": 3, "m": 2}),
    ("expfam", {"a": 0.0}), ("expfam", {"T": -1.0}), ("expfam", {"a": 1.0, "T": math.log(2)}),
    ("const_tail", {"n": 3, "m": 2, "a": -1.0}), ("remark14a", {"K": 1}), ("nope", {}),
])
def test_bad_params(family, params):
    with pytest.raises(BadParams):
        gen_preset(family, **params)


def _all_presets():
    out = [gen_preset(f) for f in FAMILIES]
    out += [gen_preset("thm11a", c=c) for c in (0.6, 0.9)]
    out += [gen_preset("thm11b", n=n, m=m) for n, m in ((3, 2), (5, 3))]
    out += [gen_preset("thm12a", n=3, m=1),
            gen_preset("expfam", n=3, m=1, a=-1.0, T=0.1),
            gen_preset("const_tail", n=3, m=1, a=-1.0),
            gen_preset("const_tail", n=3, m=2, a=2.0)]
    return out


@pytest.mark.parametrize("pre", _all_presets(), ids=lambda p: p.family)
def test_every_preset_is_ratio_equal(pre):
    rep = h_equal(*pre, tol=1e-9)
    assert rep.verdict == EQUAL, rep


def test_counterexample_pairs_differ():
    for fam in COUNTEREXAMPLES:
        p, q, _, _ = gen_preset(fam)
        assert p != q


def test_solve_c_quadratic():
    roots = solve_c(2, 1, 1.0, math.log(3))
    assert [round(r.root, 12) for r in roots] == [round(1 / 3, 12), round(2 / 3, 12)]
    assert [r.trivial for r in roots] == [True, False]


def test_solve_c_double_root():
    roots = solve_c(2, 1, 1.0, math.log(2))
    assert len(roots) == 1
    r = roots[0]
    assert abs(r.root - 0.5) < 1e-12 and r.trivial and r.multiplicity == 2


def test_solve_c_odd_function_segments():
    R = math.exp(0.03) - math.exp(0.01)
    roots = solve_c(3, 1, -1.0, 0.01)
    x0 = 3 ** -0.5
    assert len(roots) == 3 and sum(r.trivial for r in roots) == 1
    a, b, c = (r.root for r in roots)
    assert a < -x0 < b < x0 < c
    for r in roots:
        assert abs(r.root ** 3 - r.root - R) <= 1e-12 * (1 + abs(r.root) ** 3 + abs(r.root))
    # above the local maximum only the trivial root is left
    roots = solve_c(3, 1, -1.0, 1.0)
    assert len(roots) == 1 and roots[0].trivial


def _scan_roots(n, m, R, lo=-5.0, hi=5.0, N=10 ** 6):
    x = np.linspace(lo, hi, N + 1)
    g = x ** n - x ** m - R
    s = np.sign(g)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return x[idx], np.nonzero(g == 0)[0].size


def test_solve_c_matches_grid_scan():
    rng = np.random.default_rng(2024)
    pairs = [(2, 1), (3, 1), (3, 2), (4, 1), (4, 3), (5, 2), (5, 3), (5, 4)]
    for _ in range(50):
        n, m = pairs[rng.integers(len(pairs))]
        a = float(rng.choice([-1, 1]) * rng.uniform(0.2, 2.0))
        T = float(rng.uniform(0.05, 2.0))
        R = math.exp(-n * a * T) - math.exp(-m * a * T)
        roots = solve_c(n, m, a, T)
        assert any(r.trivial for r in roots)
        assert all(r.residual <= 1e-12 for r in roots)
        simple = [r.root for r in roots if r.multiplicity == 1]
        crossings, exact_hits = _scan_roots(n, m, R)
        inside = [r for r in simple if -5 < r < 5]
        assert len(crossings) + exact_hits == len(inside), (n, m, a, T, roots, crossings)
        for c in crossings:
            assert min(abs(c - r) for r in inside) <= 2e-5


def test_special_times_examples():
    st = special_times(3, 1, -1.0)
    T1 = math.log(2) - 0.5 * math.log(3)
    assert abs(st.T1 - T1) <= 1e-12 and st.T2 is None
    lhs = st.b0 - st.b0 ** 3
    rhs = math.exp(3 * st.T1) - math.exp(st.T1)
    assert abs(lhs - 2 / (3 * math.sqrt(3))) <= 1e-12 and abs(lhs - rhs) <= 1e-12
    assert abs(special_times(2, 1, 1.0).T2 - math.log(2)) <= 1e-15
    assert abs(special_times(3, 2, 1.0).T2 - math.log(1.5)) <= 1e-15


@pytest.mark.parametrize("n,m,a", [(2, 1, 1.0), (3, 2, 0.5), (3, 1, -1.0), (5, 3, -0.7), (3, 1, 2.0)])
def test_special_time_members_share_ratio(n, m, a):
    st = special_times(n, m, a)
    f = PiecewiseExpPoly.from_terms([term(1.0, 0, -a)])
    if st.T2 is not None:
        assert h_equal(f, const_tail_member(a, st.T2, st.b0), n, m).verdict == EQUAL
    if st.T1 is not None:
        T1_rhs = math.exp(-n * a * st.T1) - math.exp(-m * a * st.T1)
        assert abs(T1_rhs - (st.b0 ** m - st.b0 ** n)) <= 1e-12
        assert h_equal(f, const_tail_member(a, st.T1, -st.b0), n, m).verdict == EQUAL


def test_classification_examples():
    c = family_classify(3, 2, -1.0)
    assert c.singleton and not c.includes_negatives
    c = family_classify(2, 1, 1.0)
    assert c.case == "a_pos" and abs(c.T2 - math.log(2)) < 1e-15 and not c.includes_negatives
    c = family_classify(3, 1, -1.0)
    assert c.case == "a_neg_both_odd" and c.includes_negatives and c.T1 is not None


@pytest.mark.parametrize("n,m", [(2, 1), (3, 1), (3, 2), (4, 1), (5, 2), (5, 3)])
@pytest.mark.parametrize("a", [1.0, -1.0])
def test_negatives_exactly_for_even_gap(n, m, a):
    assert family_classify(n, m, a).includes_negatives == ((n - m) % 2 == 0)


def test_nontrivial_roots_build_members():
    rng = np.random.default_rng(7)
    pairs = [(2, 1), (3, 1), (3, 2), (5, 3)]
    checked = 0
    for _ in range(25):
        n, m = pairs[rng.integers(len(pairs))]
        a = float(rng.choice([-1, 1]) * rng.uniform(0.3, 1.5))
        T = float(rng.uniform(0.1, 1.5))
        f = PiecewiseExpPoly.from_terms([term(1.0, 0, -a)])
        for r in solve_c(n, m, a, T):
            if r.trivial:
                continue
            assert h_equal(f, exp_member(a, T, r.root), n, m).verdict == EQUAL
            checked += 1
    assert checked > 0
