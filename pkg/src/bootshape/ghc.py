"""Geometric Huffman Coding: best dyadic approximation of a pmf and the matcher code it induces."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .capacity import CapacityResult, penalty_bound, solve_capacity
from .channel import (
    BinaryChannel,
    ChannelError,
    block_weights,
    entropy,
    iid_block_pmf,
    kl_divergence,
    transition_mutual_information,
)

MAX_JOINT_BITS = 16
MIN_EXPONENT = 32
TIE_BITS = 40


class CodeError(ValueError):
    """Malformed dyadic pmf or matcher code."""


@dataclass(frozen=True)
class DyadicPmf:
    """Pmf whose entry ``i`` is ``2**-lengths[i]``, or zero where ``lengths[i]`` is None."""

    lengths: tuple[Optional[int], ...]

    def __post_init__(self):
        used = [n for n in self.lengths if n is not None]
        if not used:
            raise CodeError("dyadic pmf needs at least one nonzero entry")
        if any(n < 0 for n in used):
            raise CodeError("exponents must be non-negative")
        top = max(used)
        # Kraft equality in exact integer arithmetic
        if sum(1 << (top - n) for n in used) != 1 << top:
            raise CodeError(f"exponents {used} violate Kraft equality")

    @classmethod
    def from_probs(cls, probs) -> "DyadicPmf":
        lengths = []
        for x in np.asarray(probs, dtype=float):
            if x == 0:
                lengths.append(None)
                continue
            n = -math.log2(x)
            if n != round(n):
                raise CodeError(f"{x} is not a power of two")
            lengths.append(int(round(n)))
        return cls(tuple(lengths))

    @cached_property
    def probs(self) -> np.ndarray:
        return np.array([0.0 if n is None else 2.0**-n for n in self.lengths])

    def __len__(self):
        return len(self.lengths)


def joint_pmf(p, k: int) -> np.ndarray:
    """iid pmf of ``k`` consecutive binary symbols, first symbol most significant."""
    if not 1 <= k <= MAX_JOINT_BITS:
        raise ChannelError(f"k must be in [1, {MAX_JOINT_BITS}], got {k}")
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise ChannelError("joint_pmf expects a binary pmf")
    return iid_block_pmf(p, k)


def ghc(p) -> DyadicPmf:
    """Dyadic pmf ``d`` minimizing ``D(d || p)``.

    Huffman-style merging of the two smallest weights ``a >= b``: when
    ``a >= 4 b`` the smaller one is dropped (its probability becomes zero),
    otherwise both are joined under a parent of weight ``2 sqrt(a b)``. Weights
    equal to about 12 significant digits count as ties and are ordered by their
    lowest symbol index, so rounding noise cannot change the code. Entries
    smaller than ``2**-32`` of the total are dropped up front.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or not np.any(p > 0):
        raise CodeError("ghc needs a non-negative vector with at least one positive entry")
    p = p / p.sum()
    floor = 2.0**-MIN_EXPONENT

    # node: (tie key, lowest symbol index, node id, weight); children in a side table
    children: dict[int, tuple[int, int]] = {}
    heap = []
    for i, x in enumerate(p):
        if x >= floor:
            heap.append((_tie_key(x), i, i, float(x)))
    heapq.heapify(heap)
    next_id = len(p)
    while len(heap) > 1:
        b = heapq.heappop(heap)
        a = heapq.heappop(heap)
        if a[3] >= 4 * b[3]:
            heapq.heappush(heap, a)
            continue
        children[next_id] = (a[2], b[2])
        weight = 2 * math.sqrt(a[3] * b[3])
        heapq.heappush(heap, (_tie_key(weight), min(a[1], b[1]), next_id, weight))
        next_id += 1

    lengths: list[Optional[int]] = [None] * len(p)
    stack = [(heap[0][2], 0)]
    while stack:
        node, depth = stack.pop()
        if node < len(p):
            lengths[node] = depth
        else:
            left, right = children[node]
            stack.append((left, depth + 1))
            stack.append((right, depth + 1))
    return DyadicPmf(tuple(lengths))


def _tie_key(x: float) -> float:
    m, e = math.frexp(x)
    return math.ldexp(round(m * 2**TIE_BITS), e - TIE_BITS)


@dataclass(frozen=True)
class MatcherCode:
    """Full prefix-free set of source words, each mapped to one ``k``-bit block.

    ``entries`` pairs a source word (a string of ``'0'``/``'1'``) with a block
    value; blocks without an entry have probability zero.
    """

    k: int
    entries: tuple[tuple[str, int], ...]
    block_pmf: DyadicPmf = field(init=False)

    def __post_init__(self):
        if not 1 <= self.k <= MAX_JOINT_BITS:
            raise CodeError(f"block length must be in [1, {MAX_JOINT_BITS}]")
        blocks = [b for _, b in self.entries]
        if len(set(blocks)) != len(blocks):
            raise CodeError("a block appears in more than one entry")
        if any(not 0 <= b < 2**self.k for b in blocks):
            raise CodeError("block value out of range")
        words = sorted(w for w, _ in self.entries)
        if any(set(w) - {"0", "1"} for w in words):
            raise CodeError("source words must be binary strings")
        for a, b in zip(words, words[1:]):
            if b.startswith(a):
                raise CodeError(f"source word {a!r} is a prefix of {b!r}")
        lengths: list[Optional[int]] = [None] * 2**self.k
        for w, b in self.entries:
            lengths[b] = len(w)
        # DyadicPmf enforces Kraft equality, i.e. the word set is full
        object.__setattr__(self, "block_pmf", DyadicPmf(tuple(lengths)))

    @classmethod
    def from_mapping(cls, k: int, mapping: dict[str, str]) -> "MatcherCode":
        """Build from ``{'source word': 'block bits'}``, e.g. ``{'1': '00', '01': '01'}``."""
        entries = []
        for word, bits in mapping.items():
            if len(bits) != k:
                raise CodeError(f"block {bits!r} does not have {k} bits")
            entries.append((word, int(bits, 2)))
        return cls(k, tuple(entries))

    @cached_property
    def word_of(self) -> dict[int, str]:
        return {b: w for w, b in self.entries}

    @cached_property
    def max_length(self) -> int:
        return max(len(w) for w, _ in self.entries)

    @cached_property
    def parse_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Lookup on the next ``max_length`` source bits: (block, word length)."""
        L = self.max_length
        block = np.empty(2**L, dtype=np.int64)
        length = np.empty(2**L, dtype=np.int64)
        for w, b in self.entries:
            n = len(w)
            start = (int(w, 2) if w else 0) << (L - n)
            block[start : start + (1 << (L - n))] = b
            length[start : start + (1 << (L - n))] = n
        return block, length

    def block_string(self, block: int) -> str:
        return format(block, f"0{self.k}b")

    def table(self) -> list[str]:
        """One ``<source_word> <block_bits>`` line per entry, ordered by block."""
        return [f"{w or '-'} {self.block_string(b)}" for w, b in sorted(self.entries, key=lambda e: e[1])]

    def expected_length(self) -> float:
        return entropy(self.block_pmf.probs)


def build_matcher_code(d: DyadicPmf, k: int) -> MatcherCode:
    """Canonical prefix-free code realizing ``d`` over the ``2**k`` blocks.

    Blocks are sorted by (word length, block value) and receive consecutive
    canonical codewords.
    """
    if len(d) != 2**k:
        raise CodeError(f"dyadic pmf has {len(d)} entries, expected {2**k}")
    order = sorted((n, b) for b, n in enumerate(d.lengths) if n is not None)
    entries = []
    code = 0
    prev = order[0][0]
    for n, b in order:
        code <<= n - prev
        prev = n
        entries.append((format(code, f"0{n}b") if n else "", b))
        code += 1
    return MatcherCode(k, tuple(entries))


def identity_code(k: int = 1) -> MatcherCode:
    """Uniform matcher: every block is its own source word."""
    return build_matcher_code(DyadicPmf((k,) * 2**k), k)


def ghc_matcher(ch: BinaryChannel, k: int, cap: Optional[CapacityResult] = None) -> MatcherCode:
    """Matcher code for ``k``-bit blocks approximating the capacity-achieving iid pmf."""
    cap = cap or solve_capacity(ch)
    return build_matcher_code(ghc(joint_pmf(cap.p_star, k)), k)


def block_rates(code: MatcherCode, ch: BinaryChannel):
    """(block mutual information, block entropy, average block duration) of the matched blocks."""
    d = code.block_pmf.probs
    mi = transition_mutual_information(ch.block_transitions(code.k), d)
    duration = float(np.dot(block_weights(code.k, ch.w), d))
    return mi, entropy(d), duration


def matched_rate(code: MatcherCode, ch: BinaryChannel, cap: Optional[CapacityResult] = None):
    """Return ``(mi_rate, entropy_rate, penalty_bound)`` per unit time for the matched blocks."""
    cap = cap or solve_capacity(ch)
    mi, h, duration = block_rates(code, ch)
    return mi / duration, h / duration, penalty_bound(code.block_pmf.probs, cap, duration)


def divergence_to_target(d: DyadicPmf, p) -> float:
    return kl_divergence(d.probs, np.asarray(p, dtype=float))
