import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bootshape.bootstrap import (
    BootstrapConfig,
    ChainError,
    chain_accounting,
    coding_gain_bs,
    decode_chain,
    encode_chain,
    i_bs,
    r_bs,
    simulate_building_block,
)
from bootshape.capacity import solve_capacity
from bootshape.channel import UNIFORM, bsc, mutual_information
from bootshape.ghc import block_rates, ghc_matcher, identity_code
from bootshape.ldpc import make_systematic, parse_alist, regular_code
from bootshape.matcher import BitStream

from conftest import GRID


def noiseless_words(tx):
    return [w.copy() for w in tx.codewords]


def test_i_bs_identity_matcher():
    ch = bsc(0.03, 1, 5)
    assert i_bs(identity_code(1), ch) == pytest.approx(mutual_information(ch, UNIFORM) / 3, rel=1e-13)


def test_i_bs_exact_dyadic_target_reaches_capacity():
    ch = bsc(0.1, 2, 2)
    assert i_bs(identity_code(2), ch) == pytest.approx(solve_capacity(ch).capacity, abs=1e-12)


@pytest.mark.parametrize("eps", GRID)
def test_i_bs_near_capacity_on_grid(eps):
    ch = bsc(eps, 1, 5)
    assert i_bs(ghc_matcher(ch, 4), ch) >= 0.99 * solve_capacity(ch).capacity


def test_r_bs_examples():
    ch = bsc(0.02, 1, 5)
    m = ghc_matcher(ch, 4)
    _, h, v = block_rates(m, ch)
    assert r_bs(m, ch, 1.0) == pytest.approx(h / v, rel=1e-14)
    assert r_bs(m, ch, 0.75) == pytest.approx((h / 4 + 1 - 4 / 3) / (v / 4), rel=1e-14)
    for c in (0.3, 0.5, 0.9):
        assert r_bs(identity_code(1), bsc(0.1), c) == pytest.approx(2 - 1 / c, abs=1e-14)
    with pytest.raises(ValueError):
        r_bs(m, ch, 1.5)


def test_coding_gain_unit_cases():
    ch = bsc(0.04, 1, 5)
    m = ghc_matcher(ch, 4)
    mi, h, _ = block_rates(m, ch)
    c = 1 / (h / 4 + 1 - mi / 4)
    assert coding_gain_bs(m, ch, c) == pytest.approx(1.0, abs=1e-12)
    assert coding_gain_bs(identity_code(2), bsc(0.0, 1, 1), 1.0) == pytest.approx(1.0, abs=1e-14)


def test_coding_gain_reference_operating_points():
    # known operating points of long rate-3/4 and rate-4/5 codes
    ch = bsc(0.0575, 1, 5)
    assert coding_gain_bs(ghc_matcher(ch, 4), ch, 0.75) == pytest.approx(0.90, abs=0.005)
    ch = bsc(0.037, 1, 5)
    assert coding_gain_bs(ghc_matcher(ch, 4), ch, 0.8) > 0.921


@settings(max_examples=100, deadline=None)
@given(st.floats(0.001, 0.45), st.floats(0.2, 5), st.floats(0.2, 5), st.integers(1, 4), st.floats(0.05, 1))
def test_gain_identity(eps, w0, w1, k, c):
    ch = bsc(eps, w0, w1)
    m = ghc_matcher(ch, k)
    if block_rates(m, ch)[0] <= 0:
        with pytest.raises(ValueError):
            coding_gain_bs(m, ch, c)
        return
    assert coding_gain_bs(m, ch, c) * i_bs(m, ch) == pytest.approx(r_bs(m, ch, c), abs=1e-12)


def test_chain_accounting(code_34):
    ch = bsc(0.02, 1, 5)
    m = ghc_matcher(ch, 4)
    acct = chain_accounting(m, ch, code_34.k, code_34.m)
    assert acct.m == pytest.approx(4 / m.expected_length())
    assert acct.info_bits == pytest.approx(code_34.k / acct.m - code_34.m)
    assert acct.shaping_gain * acct.coding_gain * solve_capacity(ch).capacity == pytest.approx(
        acct.effective_rate, abs=1e-12
    )


@pytest.mark.parametrize("k", [1, 2, 4])
@pytest.mark.parametrize("blocks", [1, 2, 5])
def test_noiseless_round_trip(code_34, k, blocks):
    ch = bsc(0.03, 1, 5)
    cfg = BootstrapConfig.for_channel(code_34, ch, k, blocks)
    tx = encode_chain(cfg, BitStream(padding="pad", seed=k * 10 + blocks))
    assert len(tx.codewords) == blocks
    rx = decode_chain(cfg, noiseless_words(tx), 0.0)
    assert all(rx.block_status)
    assert np.array_equal(rx.data, tx.source_bits)


def test_round_trip_random_sources(code_34):
    ch = bsc(0.02, 1, 5)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        k = int(rng.choice([1, 2, 4]))
        b = int(rng.integers(1, 4))
        cfg = BootstrapConfig.for_channel(code_34, ch, k, b, prior="dyadic")
        src = rng.integers(0, 2, 6000).astype(np.uint8)
        tx = encode_chain(cfg, BitStream(src))
        rx = decode_chain(cfg, noiseless_words(tx), 0.0)
        assert np.array_equal(rx.data, src[: rx.data.size])
        assert tx.pad_bits == 0


def test_unmatched_fraction_vanishes(code_34):
    ch = bsc(0.02, 1, 5)
    cfg = BootstrapConfig.for_channel(code_34, ch, 4, 50)
    tx = encode_chain(cfg, BitStream(padding="pad", seed=1))
    sent = sum(w.size for w in tx.codewords)
    assert code_34.m / sent < 1 / 40


def test_consumption_matches_accounting(code_34):
    ch = bsc(0.02, 1, 5)
    cfg = BootstrapConfig.for_channel(code_34, ch, 4, 200)
    tx = encode_chain(cfg, BitStream(padding="pad", seed=2))
    acct = chain_accounting(cfg.matcher, ch, code_34.k, code_34.m)
    mean = np.mean(tx.consumed)
    assert abs(mean - code_34.k / acct.m) < 0.02 * code_34.k / acct.m
    assert abs(mean - (acct.info_bits + code_34.m)) < 0.02 * (acct.info_bits + code_34.m)


def test_low_rate_code_cannot_carry_checks(code_36):
    cfg = BootstrapConfig.for_channel(code_36, bsc(0.02, 1, 5), 4, 2)
    with pytest.raises(ChainError):
        encode_chain(cfg, BitStream(padding="pad", seed=0))


def test_first_block_failure_fails_all(code_34):
    ch = bsc(0.02, 1, 5)
    cfg = BootstrapConfig.for_channel(code_34, ch, 4, 3)
    tx = encode_chain(cfg, BitStream(padding="pad", seed=4))
    rng = np.random.default_rng(0)
    received = noiseless_words(tx)
    received[0] = rng.integers(0, 2, code_34.n).astype(np.uint8)
    rx = decode_chain(cfg, received, 0.3)
    assert rx.data is None and not any(rx.block_status)


def test_final_code_can_differ(code_34):
    ch = bsc(0.02, 1, 5)
    final = regular_code(512, 0.75, seed=3)
    cfg = BootstrapConfig.for_channel(code_34, ch, 4, 3, final_code=final)
    tx = encode_chain(cfg, BitStream(padding="pad", seed=5))
    assert tx.codewords[0].size == 512
    assert np.array_equal(decode_chain(cfg, noiseless_words(tx), 0.0).data, tx.source_bits)


def test_config_validation(code_34):
    m = ghc_matcher(bsc(0.02, 1, 5), 4)
    with pytest.raises(ValueError):
        BootstrapConfig(code_34, m, 0, [0.7, 0.3])
    with pytest.raises(ValueError):
        BootstrapConfig(code_34, m, 1, [1.0, 0.0])
    tiny = parse_alist(b"4 2\n2 3\n1 2 2 1\n3 3\n1\n1 2\n1 2\n2\n1 2 3\n2 3 4\n")
    with pytest.raises(ValueError):
        BootstrapConfig(tiny, m, 1, [0.7, 0.3])
    with pytest.raises(ValueError):
        BootstrapConfig(make_systematic(tiny), m, 1, [0.7, 0.3])
    with pytest.raises(ValueError):
        BootstrapConfig.for_channel(code_34, bsc(0.02, 1, 5), 4, 1, prior="flat")


def test_building_block_noiseless(code_36):
    ch = bsc(0.0, 1, 5)
    m = ghc_matcher(ch, 4)
    rep = simulate_building_block(code_36, m, ch, trials=20, seed=0)
    assert rep.block_errors == 0 and rep.mode == "bootstrap"


def test_building_block_report_fields(code_34):
    ch = bsc(0.03, 1, 5)
    m = ghc_matcher(ch, 4)
    rep = simulate_building_block(code_34, m, ch, trials=10, seed=0)
    assert rep.mi_rate == i_bs(m, ch)
    assert rep.effective_rate == r_bs(m, ch, code_34.rate)
    assert rep.coding_gain == coding_gain_bs(m, ch, code_34.rate)
    assert rep.p_b == rep.block_errors / rep.trials
    with pytest.raises(ValueError):
        simulate_building_block(code_34, m, ch, trials=0, seed=0)


def test_pinned_checks_help(code_36):
    ch = bsc(0.08, 1, 5)
    m = ghc_matcher(ch, 4)
    pinned = simulate_building_block(code_36, m, ch, trials=300, seed=3)
    free = simulate_building_block(code_36, m, ch, trials=300, seed=3, pin_checks=False)
    assert pinned.p_b <= free.p_b
    assert free.block_errors > 0


def test_unpinned_waterfall(code_36):
    rates = []
    for eps in (0.05, 0.13):
        ch = bsc(eps, 1, 5)
        rep = simulate_building_block(code_36, ghc_matcher(ch, 4), ch, trials=200, seed=1, pin_checks=False)
        rates.append(rep.p_b)
    assert rates[0] < 1e-2 and rates[1] > 0.9
