import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laplace_ident.counterex import COUNTEREXAMPLES, gen_preset
from laplace_ident.errors import IdenticalFunctions
from laplace_ident.fnmodel import PiecewiseExpPoly, PowerSeries, taylor_at_zero, term
from laplace_ident.series import (ONE, ZERO, boundary_relation, obstruction_for_pair,
                                  obstruction_ledger, power_coeffs)


def ps(*c):
    return PowerSeries(list(map(float, c)))


def test_power_binomial():
    assert list(power_coeffs(ps(1, 1, 0), 2).coeffs) == [1, 2, 1]


def test_power_of_t():
    assert list(power_coeffs(ps(0, 1, 0, 0), 3).coeffs) == [0, 0, 0, 1]


def test_power_of_exponential_series():
    out = power_coeffs(ps(1, -1, 0.5), 2).coeffs
    assert np.allclose(out, [1, -2, 2], atol=1e-15)


def test_power_rejects_zero():
    with pytest.raises(ValueError):
        power_coeffs(ps(1, 1), 0)


def _brute_power(c, k):
    N = len(c) - 1
    out = [0.0] * (N + 1)
    for idx in itertools.product(range(N + 1), repeat=k):
        s = sum(idx)
        if s <= N:
            out[s] += math.prod(c[j] for j in idx)
    return out


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=7), st.integers(1, 4))
def test_power_matches_brute_force(c, k):
    got = power_coeffs(PowerSeries(c), k).coeffs
    want = _brute_power(c, k)
    mag = _brute_power([abs(x) for x in c], k)
    for g, w, s in zip(got, want, mag):
        assert abs(g - w) <= 1e-10 * max(s, 1e-300) + 1e-300


def test_ledger_equal_tails_vanish():
    F, G = ps(1, 2, 3), ps(0.5, -1, 4)
    led = obstruction_ledger(F, G, G, 3, 2)
    assert all(d == 0.0 for d in led.d)


def test_ledger_ramp_decomposition():
    F = taylor_at_zero(PiecewiseExpPoly.from_terms([term(1.0, 1)]), 2)
    G, H = ps(1, 1, 0), ps(-1, 1, 0)
    assert list(obstruction_ledger(F, G, H, 2, 1).d) == [0.0, 0.0, 0.0]


def test_ledger_constant_head():
    led = obstruction_ledger(ps(1), ps(2), ps(1), 2, 1)
    assert abs(led.d[0] - 2.0) <= 1e-10
    assert led.first_nonzero() == 0


def test_ledger_recompute_is_exact():
    rng = np.random.default_rng(5)
    for _ in range(20):
        F, G, H = (PowerSeries(list(rng.normal(size=7))) for _ in range(3))
        led = obstruction_ledger(F, G, H, 3, 2)
        assert led.recompute() == led.d


def test_ledger_needs_common_order():
    with pytest.raises(ValueError):
        obstruction_ledger(ps(1, 2), ps(1), ps(1), 2, 1)


def test_pair_ramp_preset():
    p, q, n, m = gen_preset("thm12b")
    led = obstruction_for_pair(p, q, n, m, 4)
    assert led.T == 1.0 and led.all_zero()


def test_pair_constant_vs_box():
    one = PiecewiseExpPoly.constant(1.0)
    led = obstruction_for_pair(one, PiecewiseExpPoly.indicator(0.0, 1.0), 2, 1, 3)
    assert led.all_zero()


def test_pair_jump_to_two():
    one = PiecewiseExpPoly.constant(1.0)
    two_tail = PiecewiseExpPoly.indicator(0.0, 1.0) + PiecewiseExpPoly.indicator(1.0, value=2.0)
    led = obstruction_for_pair(two_tail, one, 2, 1)
    assert abs(led.d[0] - 2.0) <= 1e-10


def test_pair_identical_raises():
    one = PiecewiseExpPoly.constant(1.0)
    with pytest.raises(IdenticalFunctions):
        obstruction_for_pair(one, one, 2, 1)


def _preset_pairs():
    out = [gen_preset(f) for f in COUNTEREXAMPLES]
    out += [gen_preset("thm11a", c=0.6), gen_preset("thm11a", c=0.9),
            gen_preset("thm11b", n=3, m=2), gen_preset("thm11b", n=5, m=3),
            gen_preset("thm12a", n=3, m=1)]
    return out


@pytest.mark.parametrize("pre", _preset_pairs(), ids=lambda p: p.family)
def test_presets_have_vanishing_obstruction(pre):
    led = obstruction_for_pair(pre.p, pre.q, pre.n, pre.m, 8)
    big = max(abs(v) for t in (led.A, led.B, led.C) for v in t.values())
    assert all(abs(d) <= 1e-8 * (1 + big) for d in led.d)


def test_boundary_equal_values_at_x0():
    v = boundary_relation(0.5, 0.5, ONE, 2, 1)
    assert v.consistent


def test_boundary_distinct_values():
    v = boundary_relation(0.75, 0.25, ONE, 2, 1)
    assert v.consistent
    assert v.checks["u^n - u^m = v^n - v^m"] and v.checks["v < x0"]


def test_boundary_zero_head():
    assert boundary_relation(1.0, -1.0, ZERO, 3, 2).violated == ["n must be even"]
    assert boundary_relation(1.0, -1.0, ZERO, 2, 1).consistent
    assert not boundary_relation(1.0, 1.0, ZERO, 2, 1).consistent


def test_boundary_flags_broken_relations():
    assert not boundary_relation(1.0, 2.0, ONE, 2, 1).consistent
    assert "n odd, m even implies u <= 1" in boundary_relation(1.5, -0.5, ONE, 3, 2).checks


@pytest.mark.parametrize("n,m", [(2, 1), (3, 1), (3, 2), (5, 2), (5, 3)])
def test_boundary_equal_values_accept_only_critical_points(n, m):
    x0 = (m / n) ** (1 / (n - m))
    accepted = {0.0, x0}
    if (n - m) % 2 == 0:
        accepted.add(-x0)  # u^(n-m) = m/n also has the negative root
    for u in accepted:
        assert boundary_relation(u, u, ONE, n, m).consistent
    for u in np.linspace(-2, 2, 801):
        if min(abs(u - a) for a in accepted) > 1e-6:
            assert not boundary_relation(float(u), float(u), ONE, n, m).consistent
