import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bootshape.capacity import solve_capacity
from bootshape.channel import bsc
from bootshape.ghc import DyadicPmf, MatcherCode, build_matcher_code, ghc, ghc_matcher, identity_code
from bootshape.matcher import (
    BitStream,
    InvalidBlockError,
    UnderrunError,
    bits_to_blocks,
    bits_to_str,
    blocks_to_bits,
    dematch,
    empirical_block_pmf,
    match,
    to_bits,
)

EQ7 = MatcherCode.from_mapping(2, {"1": "00", "01": "01", "001": "10", "000": "11"})


def random_code(rng, max_k=4):
    k = int(rng.integers(1, max_k + 1))
    return build_matcher_code(ghc(rng.dirichlet(np.full(2**k, 0.5))), k)


def test_worked_example_forward():
    blocks, consumed = match(BitStream("101001"), EQ7, 3)
    assert bits_to_str(blocks_to_bits(blocks, 2)) == "000110"
    assert consumed == 6


def test_worked_example_inverse():
    assert bits_to_str(dematch(bits_to_blocks(to_bits("000110"), 2), EQ7)) == "101001"


def test_corrupted_block_changes_length():
    out = dematch(bits_to_blocks(to_bits("010110"), 2), EQ7)
    assert bits_to_str(out) == "0101001"
    assert out.size == 7


def test_identity_matcher_passes_bits_through(rng):
    bits = rng.integers(0, 2, 100)
    blocks, consumed = match(BitStream(bits), identity_code(1), 100)
    assert consumed == 100 and np.array_equal(blocks, bits)


def test_all_ones_uses_shortest_word():
    blocks, consumed = match(BitStream("1" * 10), EQ7, 10)
    assert consumed == 10 and not blocks.any()


def test_dematch_empty():
    assert dematch([], EQ7).size == 0


def test_dematch_rejects_zero_probability_block():
    code = build_matcher_code(DyadicPmf((1, 1, None, None)), 2)
    with pytest.raises(InvalidBlockError):
        dematch([3], code)


def test_underrun_raises_and_padding_counts():
    with pytest.raises(UnderrunError):
        match(BitStream("00"), EQ7, 1)
    stream = BitStream("00", padding="pad", seed=3)
    blocks, consumed = match(stream, EQ7, 1)
    assert consumed == 3 and stream.pad_bits >= 1
    again = BitStream("00", padding="pad", seed=3)
    assert np.array_equal(match(again, EQ7, 1)[0], blocks)


def test_single_block_code_consumes_nothing():
    code = build_matcher_code(DyadicPmf((0, None)), 1)
    blocks, consumed = match(BitStream(""), code, 5)
    assert consumed == 0 and blocks.tolist() == [0] * 5


def test_long_words_use_tree_walk():
    # 18-bit words exceed the lookup table width
    lengths = tuple(list(range(1, 18)) + [17])
    code = build_matcher_code(DyadicPmf(lengths + (None,) * (32 - 18)), 5)
    assert code.max_length > 16
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, 4000).astype(np.uint8)
    blocks, consumed = match(BitStream(bits), code, 200)
    assert np.array_equal(dematch(blocks, code), bits[:consumed])


def test_bit_helpers():
    assert blocks_to_bits([1, 2], 2).tolist() == [0, 1, 1, 0]
    assert bits_to_blocks([0, 1, 1, 0], 2).tolist() == [1, 2]
    with pytest.raises(ValueError):
        bits_to_blocks([1, 0, 1], 2)
    with pytest.raises(ValueError):
        to_bits("012")


def test_bitstream_push_front():
    s = BitStream("111")
    s.advance(1)
    s.push_front("00")
    assert bits_to_str(s.rest()) == "0011"


def test_round_trip_many_codes(rng):
    for seed in range(300):
        r = np.random.default_rng(seed)
        code = random_code(r)
        bits = r.integers(0, 2, 600).astype(np.uint8)
        n = int(r.integers(0, 600 // max(code.max_length, 1)))
        blocks, consumed = match(BitStream(bits), code, n)
        assert np.array_equal(dematch(blocks, code), bits[:consumed])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.integers(1, 200))
def test_prefix_monotone(seed, n_blocks, extra):
    r = np.random.default_rng(seed)
    code = random_code(r)
    bits = r.integers(0, 2, n_blocks * code.max_length + extra).astype(np.uint8)
    short, _ = match(BitStream(bits[: n_blocks * code.max_length]), code, n_blocks)
    longer, _ = match(BitStream(bits), code, n_blocks)
    assert np.array_equal(short, longer)


def binomial_ok(freq, probs, n):
    sigma = np.sqrt(probs * (1 - probs) / n)
    return np.all(np.abs(freq - probs) <= 3 * sigma + 1e-12)


def test_empirical_pmf_worked_code():
    n = 10**6
    assert binomial_ok(empirical_block_pmf(EQ7, n, seed=11), EQ7.block_pmf.probs, n)


def test_empirical_pmf_identity():
    n = 10**5
    code = identity_code(3)
    assert binomial_ok(empirical_block_pmf(code, n, seed=2), code.block_pmf.probs, n)


def test_empirical_pmf_k4_code():
    n = 10**6
    code = ghc_matcher(bsc(0.02, 1, 5), 4)
    assert binomial_ok(empirical_block_pmf(code, n, seed=5), code.block_pmf.probs, n)


def test_mean_consumption_equals_entropy():
    code = ghc_matcher(bsc(0.02, 1, 5), 4)
    n = 10**5
    src = np.random.default_rng(8).integers(0, 2, n * code.max_length).astype(np.uint8)
    _, consumed = match(BitStream(src), code, n)
    assert abs(consumed / n - code.expected_length()) < 0.01 * code.expected_length()
