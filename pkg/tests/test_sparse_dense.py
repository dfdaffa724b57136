import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bootshape.capacity import solve_capacity, uniform_shaping_gain
from bootshape.channel import UNIFORM, BinaryChannel, average_cost, bsc, mutual_information, rate_per_cost
from bootshape.sparse_dense import i_sd, r_sd, sd_gaps, ultimate_code_rate

unit = st.floats(0.001, 0.999)


def channel(a, b, w0, w1):
    return BinaryChannel(np.array([[a, b], [1 - a, 1 - b]]), np.array([w0, w1]))


def test_i_sd_limits():
    ch = bsc(0.04, 1, 5)
    p = np.array([0.75, 0.25])
    assert i_sd(ch, p, 1.0) == pytest.approx(rate_per_cost(ch, p), rel=1e-14)
    assert i_sd(ch, p, 1e-12) == pytest.approx(rate_per_cost(ch, UNIFORM), rel=1e-9)
    for c in (0.2, 0.7):
        assert i_sd(ch, UNIFORM, c) == pytest.approx(rate_per_cost(ch, UNIFORM), rel=1e-14)


def test_r_sd_examples():
    assert r_sd(bsc(0.0), UNIFORM, 1.0) == pytest.approx(1.0)
    assert r_sd(bsc(0.0, 1, 5), UNIFORM, 0.5) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        r_sd(bsc(0.1), UNIFORM, 0)


def test_ultimate_rate_examples():
    ch = bsc(0.1, 1, 5)
    assert ultimate_code_rate(ch, UNIFORM) == pytest.approx(mutual_information(ch, UNIFORM), rel=1e-14)
    assert ultimate_code_rate(bsc(0.0, 1, 5), [0.7, 0.3]) == pytest.approx(1.0)
    ch = bsc(0.057, 1, 5)
    p = solve_capacity(ch).p_star
    c = ultimate_code_rate(ch, p)
    assert 0 < c < 1
    assert abs(i_sd(ch, p, c) - r_sd(ch, p, c)) < 1e-12


def test_gaps_symmetric_identity():
    ch = bsc(0.05)
    cap = solve_capacity(ch)
    c = ultimate_code_rate(ch, cap.p_star)
    rep = sd_gaps(ch, cap.p_star, c, cap)
    assert rep.shaping_gap * rep.coding_gap == pytest.approx(r_sd(ch, cap.p_star, c) / cap.capacity, abs=1e-12)


def test_uniform_gap_equals_capacity_module():
    ch = bsc(0.02, 1, 5)
    cap = solve_capacity(ch)
    rep = sd_gaps(ch, UNIFORM, 0.75, cap)
    assert rep.shaping_gap == pytest.approx(uniform_shaping_gain(ch, cap), rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(unit, unit, st.floats(0.2, 5), st.floats(0.2, 5), unit, st.floats(0.01, 1.0))
def test_product_identity_and_crossing(a, b, w0, w1, p0, c):
    ch = channel(a, b, w0, w1)
    cap = solve_capacity(ch)
    if cap.capacity < 1e-6:
        return
    p = np.array([p0, 1 - p0])
    rep = sd_gaps(ch, p, c, cap)
    assert rep.shaping_gap * rep.coding_gap == pytest.approx(r_sd(ch, p, c) / cap.capacity, abs=1e-12)
    cp = rep.ultimate_rate
    assert 0 < cp <= 1
    if cp < 1:
        assert abs(i_sd(ch, p, cp) - r_sd(ch, p, cp)) < 1e-12
        if abs(c - cp) > 1e-9:
            assert (r_sd(ch, p, c) >= i_sd(ch, p, c)) == (c >= cp)


@settings(max_examples=100, deadline=None)
@given(unit, unit, st.floats(0.2, 5), st.floats(0.2, 5), unit, st.floats(0.01, 1.0))
def test_mediant_bound(a, b, w0, w1, p0, c):
    ch = channel(a, b, w0, w1)
    p = np.array([p0, 1 - p0])
    ends = [rate_per_cost(ch, p), rate_per_cost(ch, UNIFORM)]
    assert min(ends) - 1e-12 <= i_sd(ch, p, c) <= max(ends) + 1e-12


def test_continuity_in_c():
    ch = bsc(0.03, 1, 5)
    p = np.array([0.7, 0.3])
    cs = np.linspace(0.05, 1, 400)
    vals = np.array([i_sd(ch, p, c) for c in cs])
    assert np.max(np.abs(np.diff(vals))) < 1e-3
    assert average_cost(ch.w, p) > 0
