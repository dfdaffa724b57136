"""Monte Carlo block-error counting for uniform, sparse-dense and building-block transmission.

Every trial draws from its own generator seeded with ``(seed, trial)``. Source
bits come first and the channel noise second, and a noise draw always covers
all ``n`` positions. So two modes run with the same seed see identical data and
noise (paired comparison), and the noise patterns are nested across ``epsilon``.
"""

from __future__ import annotations

import numpy as np

from .ghc import MatcherCode
from .ldpc import (
    DEFAULT_MAX_ITER,
    LdpcCode,
    bsc_llr_matched,
    bsc_llr_uniform,
    decode_bp,
    encode,
    known_bit_llr,
)
from .matcher import BitStream, blocks_to_bits, match
from .report import MODES

DEFAULT_BATCH = 256


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def dyadic_marginal(code: MatcherCode) -> np.ndarray:
    """Per-bit pmf of the matched stream, averaged over the ``k`` bit positions."""
    d = code.block_pmf.probs
    bits = blocks_to_bits(np.arange(2**code.k), code.k).reshape(-1, code.k)
    p1 = float(np.mean(d @ bits))
    return np.array([1.0 - p1, p1])


def _draw_data(rng, code: LdpcCode, mode, matcher):
    if mode == "uniform":
        return rng.integers(0, 2, size=code.k, dtype=np.uint8)
    n_blocks = code.k // matcher.k
    source = rng.integers(0, 2, size=n_blocks * matcher.max_length, dtype=np.uint8)
    blocks, _ = match(BitStream(source), matcher, n_blocks)
    return blocks_to_bits(blocks, matcher.k)


def _llrs(mode, code, received, codewords, epsilon, prior):
    k = code.k
    if mode == "uniform":
        return bsc_llr_uniform(received, epsilon)
    head = bsc_llr_matched(received[:, :k], epsilon, prior)
    if mode == "sparse_dense":
        tail = bsc_llr_uniform(received[:, k:], epsilon)
    else:
        tail = known_bit_llr(codewords[:, k:])
    return np.concatenate([head, tail], axis=1)


def count_block_errors(
    code: LdpcCode,
    epsilon: float,
    trials: int,
    seed: int,
    mode: str,
    matcher: MatcherCode | None = None,
    prior=None,
    batch: int = DEFAULT_BATCH,
    max_iter: int = DEFAULT_MAX_ITER,
    algorithm: str = "sum-product",
) -> int:
    """Number of trials whose decoded data bits differ from the transmitted ones.

    ``uniform`` sends equiprobable data and all ``n`` bits through the BSC.
    ``sparse_dense`` sends matched data and all ``n`` bits through the channel.
    ``bootstrap`` sends the matched data bits through the channel and gives the
    decoder the check bits as known values.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if mode != "uniform":
        if matcher is None or prior is None:
            raise ValueError(f"mode {mode!r} needs a matcher and a decoder prior")
        if code.k % matcher.k:
            raise ValueError(f"k={code.k} data bits is not a multiple of the block length {matcher.k}")
    errors = 0
    for start in range(0, trials, batch):
        stop = min(trials, start + batch)
        data = np.empty((stop - start, code.k), dtype=np.uint8)
        noise = np.empty((stop - start, code.n), dtype=np.uint8)
        for row, t in enumerate(range(start, stop)):
            rng = trial_rng(seed, t)
            data[row] = _draw_data(rng, code, mode, matcher)
            noise[row] = rng.random(code.n) < epsilon
        codewords = encode(code, data)
        if mode == "bootstrap":
            noise[:, code.k :] = 0
        received = codewords ^ noise
        llrs = _llrs(mode, code, received, codewords, epsilon, prior)
        result = decode_bp(code, llrs, max_iter=max_iter, algorithm=algorithm)
        errors += int(np.sum(np.any(result.bits[:, : code.k] != data, axis=1)))
    return errors
