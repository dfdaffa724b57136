"""Streaming matcher/dematcher: prefix-free parsing of an equiprobable bit stream into k-bit blocks."""

from __future__ import annotations

import numpy as np

from .ghc import MatcherCode

TABLE_BITS = 16


class UnderrunError(RuntimeError):
    """The source stream ran out of bits and padding was not enabled."""


class InvalidBlockError(ValueError):
    """A block with zero probability (no source word) was handed to the dematcher."""


def to_bits(values) -> np.ndarray:
    """Accept ``'0101'`` strings or 0/1 sequences and return a uint8 array."""
    if isinstance(values, str):
        if set(values) - {"0", "1"}:
            raise ValueError(f"not a bit string: {values!r}")
        return np.frombuffer(values.encode(), dtype=np.uint8) - ord("0")
    bits = np.asarray(values, dtype=np.uint8)
    if bits.ndim != 1 or np.any(bits > 1):
        raise ValueError("bits must be a flat sequence of 0/1")
    return bits


def bits_to_str(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits))


def blocks_to_bits(blocks, k: int) -> np.ndarray:
    """Expand block values to bits, most significant (first transmitted) bit first."""
    blocks = np.asarray(blocks, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1)
    return ((blocks[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)


def bits_to_blocks(bits, k: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % k:
        raise ValueError(f"{bits.size} bits do not split into {k}-bit blocks")
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits.reshape(-1, k) @ weights


class BitStream:
    """Source bits with a read cursor.

    ``padding="error"`` raises :class:`UnderrunError` when a read runs past the
    end; ``padding="pad"`` appends pseudo-random equiprobable bits drawn from
    ``seed`` and counts them in :attr:`pad_bits`. A stream is meant for one
    consumer at a time.
    """

    def __init__(self, bits=(), padding: str = "error", seed: int | None = None):
        if padding not in ("error", "pad"):
            raise ValueError(f"unknown padding policy {padding!r}")
        self._bits = to_bits(bits).copy()
        self._pos = 0
        self.padding = padding
        self.pad_bits = 0
        self._rng = np.random.default_rng(seed) if padding == "pad" else None

    @property
    def remaining(self) -> int:
        return self._bits.size - self._pos

    def peek(self, n: int) -> np.ndarray:
        return self._bits[self._pos : self._pos + n]

    def advance(self, n: int):
        if n > self.remaining:
            raise UnderrunError(f"cannot consume {n} bits, {self.remaining} left")
        self._pos += n

    def ensure(self, n: int) -> bool:
        """Make at least ``n`` bits available, padding if allowed. Returns False on underrun."""
        short = n - self.remaining
        if short <= 0:
            return True
        if self.padding == "error":
            return False
        extra = self._rng.integers(0, 2, size=short, dtype=np.uint8)
        self._bits = np.concatenate([self._bits[self._pos :], extra])
        self._pos = 0
        self.pad_bits += short
        return True

    def push_front(self, bits):
        """Insert ``bits`` so that they are read next."""
        self._bits = np.concatenate([to_bits(bits), self._bits[self._pos :]])
        self._pos = 0

    def rest(self) -> np.ndarray:
        return self._bits[self._pos :].copy()


def match(stream: BitStream, code: MatcherCode, n_blocks: int) -> tuple[np.ndarray, int]:
    """Parse ``n_blocks`` source words from ``stream``; return the mapped blocks and bits consumed."""
    if n_blocks < 0:
        raise ValueError("n_blocks must be non-negative")
    if code.max_length <= TABLE_BITS:
        return _match_table(stream, code, n_blocks)
    return _match_walk(stream, code, n_blocks)


def _match_table(stream, code, n_blocks):
    L = code.max_length
    table_block, table_len = (t.tolist() for t in code.parse_table)
    blocks: list[int] = []
    consumed = 0
    while len(blocks) < n_blocks:
        # every word has at most L bits, so a full window always suffices
        window = stream.peek((n_blocks - len(blocks)) * L)
        padded = np.zeros(window.size + L, dtype=np.int64)
        padded[: window.size] = window
        index = np.zeros(window.size, dtype=np.int64)
        for j in range(L):
            index = (index << 1) | padded[j : j + window.size]
        index = index.tolist()
        pos = 0
        while len(blocks) < n_blocks and pos < window.size:
            entry = index[pos]
            n = table_len[entry]
            if pos + n > window.size:
                break
            blocks.append(table_block[entry])
            pos += n
        while len(blocks) < n_blocks and pos == window.size and table_len[0] == 0:
            blocks.append(table_block[0])  # single-block code with an empty word
        stream.advance(pos)
        consumed += pos
        if len(blocks) < n_blocks and not stream.ensure(stream.remaining + L):
            raise UnderrunError(
                f"stream exhausted after {len(blocks)} of {n_blocks} blocks ({consumed} bits consumed)"
            )
    return np.array(blocks, dtype=np.int64), consumed


def _match_walk(stream, code, n_blocks):
    lookup = {w: b for w, b in code.entries}
    blocks = np.empty(n_blocks, dtype=np.int64)
    consumed = 0
    for i in range(n_blocks):
        word = ""
        while word not in lookup:
            if not stream.ensure(1):
                raise UnderrunError(f"stream exhausted after {i} of {n_blocks} blocks")
            word += "1" if stream.peek(1)[0] else "0"
            stream.advance(1)
            consumed += 1
        blocks[i] = lookup[word]
    return blocks, consumed


def dematch(blocks, code: MatcherCode) -> np.ndarray:
    """Concatenate the source words of ``blocks``; the exact inverse of :func:`match`."""
    words = code.word_of
    parts = []
    for b in np.asarray(blocks, dtype=np.int64).tolist():
        try:
            parts.append(words[b])
        except KeyError:
            raise InvalidBlockError(
                f"block {code.block_string(b)} has zero probability under the code"
            ) from None
    return to_bits("".join(parts))


def empirical_block_pmf(code: MatcherCode, n_samples: int, seed: int) -> np.ndarray:
    """Block frequencies from matching a seeded equiprobable source."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    source = rng.integers(0, 2, size=n_samples * code.max_length, dtype=np.uint8)
    blocks, _ = match(BitStream(source), code, n_samples)
    return np.bincount(blocks, minlength=2**code.k) / n_samples
