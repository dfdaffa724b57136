"""Rates of sparse-dense transmission: shaped systematic bits, uniform check bits."""

from __future__ import annotations

from dataclasses import dataclass

from .capacity import CapacityResult
from .channel import UNIFORM, BinaryChannel, average_cost, entropy, mutual_information

DENOMINATOR_FLOOR = 1e-14


@dataclass(frozen=True)
class SparseDenseReport:
    mi_per_weight: float
    rate: float
    ultimate_rate: float
    shaping_gap: float
    coding_gap: float


def _check_rate(c):
    if not 0 < c <= 1:
        raise ValueError(f"code rate must be in (0, 1], got {c}")


def _mixture_cost(ch, p, c):
    return c * average_cost(ch.w, p) + (1 - c) * average_cost(ch.w, UNIFORM)


def i_sd(ch: BinaryChannel, p, c: float) -> float:
    """Mutual information per average weight when a fraction ``c`` of bits follows ``p``."""
    _check_rate(c)
    mi = c * mutual_information(ch, p) + (1 - c) * mutual_information(ch, UNIFORM)
    return mi / _mixture_cost(ch, p, c)


def r_sd(ch: BinaryChannel, p, c: float) -> float:
    """Information rate carried by the shaped systematic bits per average weight."""
    _check_rate(c)
    return c * entropy(p) / _mixture_cost(ch, p, c)


def ultimate_code_rate(ch: BinaryChannel, p) -> float:
    """Code rate ``c`` at which ``i_sd(p, c) == r_sd(p, c)``.

    Both ratios share a denominator, so equating numerators gives
    ``c = I(u) / (H(p) - I(p) + I(u))``.
    """
    iu = mutual_information(ch, UNIFORM)
    denom = entropy(p) - mutual_information(ch, p) + iu
    if denom >= DENOMINATOR_FLOOR:
        return min(iu / denom, 1.0)
    return _bisect_rate(ch, p)


def _bisect_rate(ch, p):
    def gap(c):
        return i_sd(ch, p, c) - r_sd(ch, p, c)

    lo, hi = 1e-12, 1.0
    if gap(hi) >= 0 or gap(lo) <= 0:
        return 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sd_gaps(ch: BinaryChannel, p, c: float, cap: CapacityResult) -> SparseDenseReport:
    """Shaping gap ``I_sd(p)/C`` and coding gap ``R_sd(p, c)/I_sd(p)``, with ``I_sd(p)`` at ``c(p)``."""
    cp = ultimate_code_rate(ch, p)
    mi = i_sd(ch, p, cp)
    rate = r_sd(ch, p, c)
    return SparseDenseReport(
        mi_per_weight=mi,
        rate=rate,
        ultimate_rate=cp,
        shaping_gap=mi / cap.capacity,
        coding_gap=rate / mi,
    )
