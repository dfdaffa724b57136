"""Bootstrap chaining: check bits are fed back into the matcher so every transmitted bit but the last block's checks is shaped.

Encoding order is round 1, 2, ..., B. Rounds before the last use ``code``; the
last round uses ``final_code`` and leaves its check bits (the ur-bits)
unmatched. The check bits of round ``i`` are pushed onto the head of the
source stream, so they are the first bits consumed by round ``i + 1``. Blocks
are sent last-encoded first, and the decoder walks back from the ur-bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .capacity import CapacityResult, solve_capacity
from .channel import BinaryChannel
from .ghc import MatcherCode, block_rates, ghc_matcher
from .ldpc import (
    DEFAULT_MAX_ITER,
    LdpcCode,
    bsc_llr_matched,
    bsc_llr_uniform,
    decode_bp,
    encode,
    known_bit_llr,
)
from .matcher import BitStream, InvalidBlockError, bits_to_blocks, blocks_to_bits, dematch, match
from .report import TransmissionReport
from .simulation import count_block_errors, dyadic_marginal


class ChainError(RuntimeError):
    """The chain cannot carry the fed-back check bits (code rate too low for the matcher)."""


def i_bs(matcher: MatcherCode, ch: BinaryChannel) -> float:
    """Mutual information rate of the matched blocks: block MI over average block duration."""
    mi, _, duration = block_rates(matcher, ch)
    return mi / duration


def _net_bits_per_matched_bit(matcher, c):
    _check_rate(c)
    return matcher.expected_length() / matcher.k + 1 - 1 / c


def _check_rate(c):
    if not 0 < c <= 1:
        raise ValueError(f"code rate must be in (0, 1], got {c}")


def r_bs(matcher: MatcherCode, ch: BinaryChannel, c: float) -> float:
    """Effective information rate ``(H/k + 1 - 1/c) / (v.p / k)``; negative when ``c`` is too low."""
    _, _, duration = block_rates(matcher, ch)
    return _net_bits_per_matched_bit(matcher, c) / (duration / matcher.k)


def coding_gain_bs(matcher: MatcherCode, ch: BinaryChannel, c: float) -> float:
    """``(H/k + 1 - 1/c) / (I/k)``, which equals ``r_bs / i_bs``."""
    mi, _, _ = block_rates(matcher, ch)
    if mi <= 0:
        raise ValueError("the matched blocks carry no information over this channel")
    return _net_bits_per_matched_bit(matcher, c) / (mi / matcher.k)


@dataclass(frozen=True)
class ChainAccounting:
    m: float
    info_bits: float
    effective_rate: float
    mi_rate: float
    shaping_gain: float
    coding_gain: float


def chain_accounting(
    matcher: MatcherCode, ch: BinaryChannel, k_data: int, m_check: int, cap: Optional[CapacityResult] = None
) -> ChainAccounting:
    cap = cap or solve_capacity(ch)
    c = k_data / (k_data + m_check)
    m = matcher.k / matcher.expected_length()
    mi_rate = i_bs(matcher, ch)
    rate = r_bs(matcher, ch, c)
    return ChainAccounting(
        m=m,
        info_bits=k_data / m - m_check,
        effective_rate=rate,
        mi_rate=mi_rate,
        shaping_gain=mi_rate / cap.capacity,
        coding_gain=coding_gain_bs(matcher, ch, c),
    )


@dataclass(frozen=True, eq=False)
class BootstrapConfig:
    """Codes, matcher, chain length and the decoder prior ``(pi0, pi1)`` for matched bits."""

    code: LdpcCode
    matcher: MatcherCode
    blocks: int
    prior: np.ndarray
    final_code: Optional[LdpcCode] = None

    def __post_init__(self):
        if self.blocks < 1:
            raise ValueError("a chain needs at least one block")
        if self.final_code is None:
            object.__setattr__(self, "final_code", self.code)
        for name, c in (("code", self.code), ("final_code", self.final_code)):
            if not c.systematic:
                raise ValueError(f"{name} must be in systematic form")
            if c.k % self.matcher.k:
                raise ValueError(f"{name} has {c.k} data bits, not a multiple of k={self.matcher.k}")
        prior = np.asarray(self.prior, dtype=float)
        if prior.shape != (2,) or np.any(prior <= 0):
            raise ValueError("prior must be a binary pmf with both entries positive")
        object.__setattr__(self, "prior", prior)

    @classmethod
    def for_channel(
        cls,
        code: LdpcCode,
        ch: BinaryChannel,
        k: int,
        blocks: int,
        final_code: Optional[LdpcCode] = None,
        prior: str = "capacity",
        cap: Optional[CapacityResult] = None,
    ) -> "BootstrapConfig":
        """GHC matcher for ``k``-bit blocks; the prior is the capacity-achieving pmf or the matcher's own marginal."""
        cap = cap or solve_capacity(ch)
        matcher = ghc_matcher(ch, k, cap)
        if prior == "capacity":
            pi = cap.p_star
        elif prior == "dyadic":
            pi = dyadic_marginal(matcher)
        else:
            raise ValueError(f"unknown prior {prior!r}")
        return cls(code, matcher, blocks, pi, final_code)

    def code_for_round(self, index: int) -> LdpcCode:
        """Code used by 1-based round ``index``."""
        return self.final_code if index == self.blocks else self.code


@dataclass
class ChainTransmission:
    """Encoder output: codewords in transmission order and the source bits they carry."""

    codewords: list[np.ndarray]
    source_bits: np.ndarray
    consumed: list[int] = field(default_factory=list)
    pad_bits: int = 0


def encode_chain(cfg: BootstrapConfig, data: BitStream) -> ChainTransmission:
    words = []
    segments = []
    consumed = []
    m_prev = 0
    for index in range(1, cfg.blocks + 1):
        code = cfg.code_for_round(index)
        blocks, used = match(data, cfg.matcher, code.k // cfg.matcher.k)
        if used < m_prev:
            raise ChainError(
                f"round {index} consumed {used} bits but {m_prev} fed-back check bits "
                "must be carried; the code rate is too low for this matcher"
            )
        segments.append(dematch(blocks, cfg.matcher)[m_prev:])
        consumed.append(used)
        word = encode(code, blocks_to_bits(blocks, cfg.matcher.k))
        words.append(word)
        if index < cfg.blocks:
            data.push_front(word[code.k :])
            m_prev = code.m
    return ChainTransmission(words[::-1], np.concatenate(segments), consumed, data.pad_bits)


@dataclass
class ChainDecoding:
    data: Optional[np.ndarray]
    block_status: list[bool]
    iterations: list[int] = field(default_factory=list)


def decode_chain(
    cfg: BootstrapConfig, received, epsilon: float, max_iter: int = DEFAULT_MAX_ITER
) -> ChainDecoding:
    """Decode blocks in arrival order, pinning each block's check bits from its successor.

    ``block_status[i]`` refers to encoding round ``i + 1``. A failed block fails
    every block decoded after it, and ``data`` is None unless all blocks succeed.
    """
    received = [np.asarray(y, dtype=np.uint8) for y in received]
    if len(received) != cfg.blocks:
        raise ValueError(f"expected {cfg.blocks} received words, got {len(received)}")
    status = [False] * cfg.blocks
    iterations = []
    segments = []
    pinned = None
    for pos, y in enumerate(received):
        index = cfg.blocks - pos
        code = cfg.code_for_round(index)
        if y.size != code.n:
            raise ValueError(f"block {index} has {y.size} bits, expected {code.n}")
        head = bsc_llr_matched(y[: code.k], epsilon, cfg.prior)
        tail = bsc_llr_uniform(y[code.k :], epsilon) if pinned is None else known_bit_llr(pinned)
        bits, ok, its = decode_bp(code, np.concatenate([head, tail]), max_iter=max_iter)
        iterations.append(its)
        if not ok:
            break
        try:
            source = dematch(bits_to_blocks(bits[: code.k], cfg.matcher.k), cfg.matcher)
        except InvalidBlockError:
            break
        m_prev = cfg.code.m if index > 1 else 0
        if source.size < m_prev:
            break
        status[index - 1] = True
        segments.append(source[m_prev:])
        pinned = source[:m_prev]
    if not all(status):
        return ChainDecoding(None, status, iterations)
    return ChainDecoding(np.concatenate(segments[::-1]), status, iterations)


def simulate_building_block(
    code: LdpcCode,
    matcher: MatcherCode,
    ch: BinaryChannel,
    trials: int,
    seed: int,
    epsilon: Optional[float] = None,
    prior=None,
    cap: Optional[CapacityResult] = None,
    pin_checks: bool = True,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TransmissionReport:
    """Monte Carlo of ``k_data`` matched bits over a BSC decoded with the check bits known.

    With ``pin_checks=False`` the check bits travel through the channel instead
    (plain sparse-dense transmission of the same code). ``epsilon`` defaults to
    the crossover probability of ``ch``, which must then be symmetric.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if epsilon is None:
        epsilon = float(ch.h[1, 0])
        if not np.isclose(ch.h[0, 1], epsilon):
            raise ValueError("pass epsilon explicitly for an asymmetric channel")
    cap = cap or solve_capacity(ch)
    prior = cap.p_star if prior is None else prior
    mode = "bootstrap" if pin_checks else "sparse_dense"
    errors = count_block_errors(code, epsilon, trials, seed, mode, matcher, prior, max_iter=max_iter)
    acct = chain_accounting(matcher, ch, code.k, code.m, cap)
    return TransmissionReport(
        epsilon=epsilon,
        code_rate=code.rate,
        mode=mode,
        trials=trials,
        block_errors=errors,
        p_b=errors / trials,
        capacity=cap.capacity,
        shaping_gain=acct.shaping_gain,
        coding_gain=acct.coding_gain,
        effective_rate=acct.effective_rate,
        mi_rate=acct.mi_rate,
    )
