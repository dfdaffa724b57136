"""Binary channels with unequal symbol durations and the information measures on them.

Conventions used throughout the package:

* logarithms are base 2, so every rate is in bits;
* ``h[j, i]`` is the probability of output ``j`` given input ``i`` (columns sum to one);
* a ``k``-bit block is indexed by the integer whose most significant bit is the
  first transmitted bit, so block ``0b0111`` is ``0, 1, 1, 1`` in time order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

PMF_TOL = 1e-12
MAX_BLOCK_BITS = 20


class ChannelError(ValueError):
    """Invalid channel parameters or probability vectors."""


def as_pmf(values, tol: float = PMF_TOL) -> np.ndarray:
    """Validate ``values`` as a probability vector and return it as a float array."""
    p = np.asarray(values, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ChannelError(f"pmf must be a non-empty vector, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ChannelError("pmf entries must be finite and non-negative")
    if abs(p.sum() - 1.0) > tol:
        raise ChannelError(f"pmf sums to {p.sum():.15g}, not 1")
    return p


UNIFORM = np.array([0.5, 0.5])


@dataclass(frozen=True, eq=False)
class BinaryChannel:
    """2x2 transition matrix ``h`` (row = output, column = input) plus symbol durations ``w``."""

    h: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        w = np.array(self.w, dtype=float)
        if h.shape != (2, 2):
            raise ChannelError(f"transition matrix must be 2x2, got {h.shape}")
        if np.any(h < 0) or np.any(h > 1):
            raise ChannelError("transition probabilities must lie in [0, 1]")
        if np.any(np.abs(h.sum(axis=0) - 1.0) > PMF_TOL):
            raise ChannelError("each column of the transition matrix must sum to 1")
        if w.shape != (2,) or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ChannelError("durations must be two positive finite numbers")
        h.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "w", w)

    @cached_property
    def degenerate(self) -> bool:
        """True when both inputs induce the same output distribution (zero capacity)."""
        return bool(np.allclose(self.h[:, 0], self.h[:, 1], rtol=0, atol=1e-15))

    def block_transitions(self, k: int) -> np.ndarray:
        """Transition matrix of ``k`` independent uses, indexed by big-endian block value."""
        _check_block_length(k)
        out = np.ones((1, 1))
        for _ in range(k):
            out = np.kron(out, self.h)
        return out

    def __repr__(self):
        return f"BinaryChannel(h={self.h.tolist()}, w={self.w.tolist()})"


def bsc(epsilon: float, w0: float = 1.0, w1: float = 1.0) -> BinaryChannel:
    """Binary symmetric channel with crossover ``epsilon`` and durations ``(w0, w1)``."""
    if not 0 <= epsilon < 0.5:
        raise ChannelError(f"crossover probability must be in [0, 0.5), got {epsilon}")
    if w0 <= 0 or w1 <= 0:
        raise ChannelError("symbol durations must be positive")
    e = float(epsilon)
    return BinaryChannel(np.array([[1 - e, e], [e, 1 - e]]), np.array([w0, w1], dtype=float))


def output_pmf(ch: BinaryChannel, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise ChannelError(f"input pmf must have 2 entries, got shape {p.shape}")
    return ch.h @ p


def information_density(h: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Per-input divergence ``D_i = sum_j h_ji log2(h_ji / r_j)``.

    Terms with ``h_ji = 0`` contribute nothing. A term with ``h_ji > 0`` and
    ``r_j = 0`` cannot occur when ``r`` is the output of a pmf supported on ``i``;
    it is reported as ``+inf`` otherwise.
    """
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    out = np.zeros(h.shape[1])
    for i in range(h.shape[1]):
        col = h[:, i]
        mask = col > 0
        if np.any(r[mask] <= 0):
            out[i] = np.inf
            continue
        out[i] = float(np.sum(col[mask] * np.log2(col[mask] / r[mask])))
    return out


def transition_mutual_information(h: np.ndarray, p: np.ndarray) -> float:
    """Mutual information in bits for an arbitrary transition matrix ``h`` and input ``p``."""
    p = np.asarray(p, dtype=float)
    # outputs reachable from the support have positive mass even if h @ p underflows
    r = np.maximum(h @ p, np.finfo(float).tiny)
    support = p > 0
    d = information_density(h[:, support], r)
    return float(np.dot(p[support], d))


def mutual_information(ch: BinaryChannel, p) -> float:
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise ChannelError(f"input pmf must have 2 entries, got shape {p.shape}")
    return transition_mutual_information(ch.h, p)


def kl_divergence(q, r) -> float:
    """``D(q || r)`` in bits; ``+inf`` if ``q`` puts mass where ``r`` has none."""
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    if q.shape != r.shape:
        raise ChannelError(f"shape mismatch {q.shape} vs {r.shape}")
    mask = q > 0
    if np.any(r[mask] <= 0):
        return float("inf")
    return float(np.sum(q[mask] * (np.log2(q[mask]) - np.log2(r[mask]))))


def entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def binary_entropy(x: float) -> float:
    return entropy([x, 1.0 - x])


def average_cost(w, p) -> float:
    return float(np.dot(np.asarray(w, dtype=float), np.asarray(p, dtype=float)))


def rate_per_cost(ch: BinaryChannel, p) -> float:
    """Mutual information per unit of average symbol duration (bits per time unit)."""
    return mutual_information(ch, p) / average_cost(ch.w, p)


def _check_block_length(k: int):
    if not 1 <= k <= MAX_BLOCK_BITS:
        raise ChannelError(f"block length must be in [1, {MAX_BLOCK_BITS}], got {k}")


def block_ones(k: int) -> np.ndarray:
    """Number of ones in every ``k``-bit block value."""
    _check_block_length(k)
    values = np.arange(2**k)
    return np.array([int(v).bit_count() for v in values])


def block_weights(k: int, w) -> np.ndarray:
    """Duration of every ``k``-bit block: zeros cost ``w[0]``, ones cost ``w[1]``."""
    w = np.asarray(w, dtype=float)
    ones = block_ones(k)
    return (k - ones) * w[0] + ones * w[1]


def block_bits(k: int) -> np.ndarray:
    """``(2**k, k)`` array whose row ``b`` lists the bits of block ``b`` in transmission order."""
    _check_block_length(k)
    shifts = np.arange(k - 1, -1, -1)
    return ((np.arange(2**k)[:, None] >> shifts) & 1).astype(np.uint8)


def iid_block_pmf(p, k: int) -> np.ndarray:
    """Pmf of ``k`` iid symbols drawn from the binary pmf ``p``, indexed by block value.

    Entries are computed as ``p0**zeros * p1**ones`` so blocks of equal
    composition get bit-identical probabilities.
    """
    p = np.asarray(p, dtype=float)
    ones = block_ones(k)
    return p[0] ** (k - ones) * p[1] ** ones
