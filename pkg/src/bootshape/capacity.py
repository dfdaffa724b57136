"""Capacity per unit cost of a binary channel and the wrong-pmf penalty identities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    UNIFORM,
    BinaryChannel,
    ChannelError,
    average_cost,
    iid_block_pmf,
    information_density,
    kl_divergence,
    output_pmf,
    rate_per_cost,
)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200


class ConvergenceError(RuntimeError):
    """The solver ran out of iterations; ``best`` holds the last iterate."""

    def __init__(self, message: str, best: "CapacityResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class CapacityResult:
    p_star: np.ndarray
    capacity: float
    r_star: np.ndarray
    kkt_residual: float
    iterations: int = 0


def _inner_optimum(h, w, lam):
    """Maximize ``I(p) - lam * w.p`` over binary input pmfs ``p = (a, 1 - a)``.

    The objective is concave in ``a`` with derivative
    ``(D_0 - lam w_0) - (D_1 - lam w_1)``, which decreases monotonically, so its
    root is found by bisection. Returns ``a`` and the objective value there.
    """
    h00, h01, h10, h11 = h[0, 0], h[0, 1], h[1, 0], h[1, 1]
    w0, w1 = w

    def slopes(a):
        r0 = h00 * a + h01 * (1 - a)
        r1 = h10 * a + h11 * (1 - a)
        d0 = _xlog(h00, r0) + _xlog(h10, r1) - lam * w0
        d1 = _xlog(h01, r0) + _xlog(h11, r1) - lam * w1
        return d0, d1

    lo, hi = 0.0, 1.0
    a = 0.5
    for _ in range(200):
        a = 0.5 * (lo + hi)
        if a in (lo, hi):
            break
        d0, d1 = slopes(a)
        if d0 > d1:
            lo = a
        else:
            hi = a
    d0, d1 = slopes(a)
    return a, a * d0 + (1 - a) * d1


def _xlog(x, y):
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return math.inf
    return x * math.log2(x / y)


def solve_capacity(
    ch: BinaryChannel, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> CapacityResult:
    """Capacity-achieving input pmf and capacity ``max_p I(p) / w.p``.

    The ratio objective is handled by a sequence of Lagrangian problems
    ``max_p I(p) - lam * w.p``. After each inner solve the rate moves to
    ``I(p)/w.p`` of the solution, a lower bound on capacity that increases
    monotonically, while a rate whose inner optimum is negative becomes an upper
    bound. Iteration stops once the optimality conditions hold to ``tol``;
    ``max_iter`` caps the number of rate updates.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if ch.degenerate:
        r = output_pmf(ch, UNIFORM)
        return CapacityResult(UNIFORM.copy(), 0.0, r, 0.0, 0)

    h = np.asarray(ch.h)
    w = tuple(float(x) for x in ch.w)
    lo = rate_per_cost(ch, UNIFORM)
    hi = 1.0 / min(w)
    lam = lo
    best = None
    for step in range(1, max_iter + 1):
        a, value = _inner_optimum(h, w, lam)
        p = np.array([a, 1.0 - a])
        rate = rate_per_cost(ch, p)
        if value >= 0:
            lo = max(lo, lam, rate)
        else:
            hi = min(hi, lam)
        best = _result(ch, p, rate, step)
        if best.kkt_residual <= tol:
            return best
        # Dinkelbach step, falling back to bisection if it leaves the bracket
        nxt = rate if rate > lam else 0.5 * (lo + hi)
        if not lo <= nxt <= hi or nxt == lam:
            nxt = 0.5 * (lo + hi)
        if nxt == lam:
            break
        lam = nxt
    raise ConvergenceError(
        f"capacity solver did not reach kkt residual {tol:g} in {max_iter} iterations", best
    )


def _result(ch, p, rate, iterations):
    r = output_pmf(ch, p)
    res = CapacityResult(p, rate, r, 0.0, iterations)
    return CapacityResult(p, rate, r, kkt_check(ch, res), iterations)


def kkt_check(ch: BinaryChannel, result: CapacityResult) -> float:
    """Largest violation of ``D_i(r*) <= C w_i`` (with equality on the support of ``p*``).

    ``D_i`` is the divergence between the output distribution of input ``i`` and
    the output pmf ``r*`` induced by ``p*``.
    """
    if ch.degenerate:
        return 0.0
    r_star = output_pmf(ch, result.p_star)
    slack = information_density(ch.h, r_star) - result.capacity * ch.w
    viol = np.where(result.p_star > 0, np.abs(slack), np.maximum(slack, 0.0))
    return float(np.max(viol))


def _check_support(p, p_star):
    p = np.asarray(p, dtype=float)
    if p.shape != p_star.shape:
        raise ChannelError(f"pmf shape {p.shape} does not match {p_star.shape}")
    if np.any((p > 0) & (p_star <= 0)):
        raise ChannelError("pmf puts mass on an input the capacity-achieving pmf excludes")
    return p


def wrong_pmf_rate(ch: BinaryChannel, p, result: CapacityResult) -> float:
    """Rate of input pmf ``p`` expressed as capacity minus the output-divergence penalty."""
    p = _check_support(p, result.p_star)
    r = output_pmf(ch, p)
    return result.capacity - kl_divergence(r, result.r_star) / average_cost(ch.w, p)


def joint_reference(p_star: np.ndarray, size: int) -> np.ndarray:
    """iid block pmf with ``size`` entries built from ``p_star`` (``size`` a power of 2)."""
    k = int(round(math.log2(size)))
    if 2**k != size:
        raise ChannelError(f"pmf length {size} is not a power of two")
    if p_star.shape != (2,):
        raise ChannelError("block reference needs a binary pmf")
    return iid_block_pmf(p_star, k)


def penalty_bound(p, result: CapacityResult, w_cost: float) -> float:
    """Upper bound ``D(p || p*) / w_cost`` on the rate penalty of using ``p``.

    ``p`` may be a pmf over ``2**k`` blocks, in which case it is compared against
    the iid block pmf built from ``p*``.
    """
    p = np.asarray(p, dtype=float)
    ref = result.p_star if p.size == 2 else joint_reference(result.p_star, p.size)
    p = _check_support(p, ref)
    return kl_divergence(p, ref) / w_cost


def uniform_shaping_gain(ch: BinaryChannel, result: CapacityResult) -> float:
    """Fraction of capacity achieved by the uniform input pmf."""
    if result.capacity == 0:
        return 1.0
    return rate_per_cost(ch, UNIFORM) / result.capacity


def output_penalty(ch: BinaryChannel, p, result: CapacityResult) -> float:
    """Actual rate penalty ``D(r || r*) / w.p`` of input pmf ``p``."""
    p = _check_support(p, result.p_star)
    return kl_divergence(output_pmf(ch, p), result.r_star) / average_cost(ch.w, p)

