"""Sweeps over the BSC crossover probability for uniform, sparse-dense and bootstrap transmission."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bootstrap import BootstrapConfig, chain_accounting, decode_chain, encode_chain
from .capacity import solve_capacity, uniform_shaping_gain
from .channel import UNIFORM, average_cost, bsc, mutual_information
from .ghc import ghc_matcher
from .ldpc import LdpcCode, make_systematic, parse_alist, regular_code
from .matcher import BitStream
from .report import MODES, TransmissionReport
from .simulation import count_block_errors, dyadic_marginal, trial_rng
from .sparse_dense import sd_gaps

log = logging.getLogger(__name__)

DEFAULT_EPSILONS = tuple([round(0.005 * i, 3) for i in range(1, 12)] + [0.057])


class SweepConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass
class SweepConfig:
    w0: float = 1.0
    w1: float = 5.0
    epsilons: Sequence[float] = DEFAULT_EPSILONS
    k: int = 4
    mode: str = "bootstrap"
    rates: Sequence[float] = (0.75,)
    code_n: int = 1024
    code_file: Optional[str] = None
    code_seed: int = 0
    blocks: int = 1
    trials: int = 1000
    seed: int = 1
    max_iter: int = 50
    prior: str = "capacity"
    out: Optional[str] = None

    def validate(self):
        if self.mode not in MODES:
            raise SweepConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if not self.epsilons:
            raise SweepConfigError("at least one epsilon is required")
        for e in self.epsilons:
            if not 0 < e < 0.5:
                raise SweepConfigError(f"epsilon {e} outside (0, 0.5)")
        if self.trials < 1:
            raise SweepConfigError("trials must be at least 1")
        if self.blocks < 1:
            raise SweepConfigError("blocks must be at least 1")
        if self.w0 <= 0 or self.w1 <= 0:
            raise SweepConfigError("durations must be positive")
        if not 1 <= self.k <= 16:
            raise SweepConfigError("k must be in [1, 16]")
        if self.prior not in ("capacity", "dyadic"):
            raise SweepConfigError("prior must be 'capacity' or 'dyadic'")
        if self.code_file is None:
            for r in self.rates:
                if not 0 < r < 1:
                    raise SweepConfigError(f"code rate {r} outside (0, 1)")


def load_codes(cfg: SweepConfig) -> list[LdpcCode]:
    if cfg.code_file:
        text = Path(cfg.code_file).read_bytes()
        return [make_systematic(parse_alist(text), drop_redundant=True)]
    return [regular_code(cfg.code_n, float(r), cfg.code_seed) for r in cfg.rates]


def _uniform_point(ch, cap, code):
    c = code.rate
    iu = mutual_information(ch, UNIFORM)
    mi_rate = iu / average_cost(ch.w, UNIFORM)
    shaping = uniform_shaping_gain(ch, cap)
    coding = c / iu
    return shaping, coding, shaping * coding * cap.capacity, mi_rate


def _chain_errors(cfg, bcfg, epsilon, trial):
    rng = trial_rng(cfg.seed, trial)
    stream = BitStream(padding="pad", seed=int(rng.integers(2**63)))
    tx = encode_chain(bcfg, stream)
    received = [w ^ (rng.random(w.size) < epsilon).astype(np.uint8) for w in tx.codewords]
    rx = decode_chain(bcfg, received, epsilon, max_iter=cfg.max_iter)
    if rx.data is not None and not np.array_equal(rx.data, tx.source_bits):
        return bcfg.blocks
    return bcfg.blocks - sum(rx.block_status)


def run_point(cfg: SweepConfig, code: LdpcCode, epsilon: float) -> TransmissionReport:
    ch = bsc(epsilon, cfg.w0, cfg.w1)
    cap = solve_capacity(ch)
    trials = cfg.trials
    if cfg.mode == "uniform":
        shaping, coding, rate, mi_rate = _uniform_point(ch, cap, code)
        errors = count_block_errors(code, epsilon, trials, cfg.seed, "uniform", max_iter=cfg.max_iter)
    else:
        matcher = ghc_matcher(ch, cfg.k, cap)
        prior = cap.p_star if cfg.prior == "capacity" else dyadic_marginal(matcher)
        if code.k % cfg.k:
            raise SweepConfigError(f"code has {code.k} data bits, not a multiple of k={cfg.k}")
        if cfg.mode == "sparse_dense":
            sd = sd_gaps(ch, dyadic_marginal(matcher), code.rate, cap)
            shaping, coding, rate, mi_rate = sd.shaping_gap, sd.coding_gap, sd.rate, sd.mi_per_weight
            errors = count_block_errors(
                code, epsilon, trials, cfg.seed, "sparse_dense", matcher, prior, max_iter=cfg.max_iter
            )
        else:
            acct = chain_accounting(matcher, ch, code.k, code.m, cap)
            if acct.effective_rate < 0:
                raise SweepConfigError(
                    f"rate {code.rate:.4g} code cannot carry the recycled check bits at epsilon={epsilon} "
                    f"(effective rate {acct.effective_rate:.4g} < 0)"
                )
            shaping, coding, rate, mi_rate = (
                acct.shaping_gain,
                acct.coding_gain,
                acct.effective_rate,
                acct.mi_rate,
            )
            if cfg.blocks == 1:
                errors = count_block_errors(
                    code, epsilon, trials, cfg.seed, "bootstrap", matcher, prior, max_iter=cfg.max_iter
                )
            else:
                bcfg = BootstrapConfig(code, matcher, cfg.blocks, prior)
                errors = sum(_chain_errors(cfg, bcfg, epsilon, t) for t in range(trials))
                trials *= cfg.blocks
    log.info("%s rate=%.4g eps=%.4g: %d/%d block errors", cfg.mode, code.rate, epsilon, errors, trials)
    return TransmissionReport(
        epsilon=float(epsilon),
        code_rate=code.rate,
        mode=cfg.mode,
        trials=trials,
        block_errors=errors,
        p_b=errors / trials,
        capacity=cap.capacity,
        shaping_gain=shaping,
        coding_gain=coding,
        effective_rate=rate,
        mi_rate=mi_rate,
    )


def run_sweep(cfg: SweepConfig) -> list[TransmissionReport]:
    cfg.validate()
    codes = load_codes(cfg)
    reports = [run_point(cfg, code, e) for code in codes for e in cfg.epsilons]
    return sort_reports(reports)


def sort_reports(reports):
    return sorted(reports, key=lambda r: (r.mode, r.epsilon, r.code_rate))


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.6g}"


def emit_csv(reports, out) -> Path:
    out = Path(out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TransmissionReport.columns())
        for r in sort_reports(reports):
            writer.writerow([_fmt(getattr(r, c)) for c in TransmissionReport.columns()])
    return out


def read_csv(path) -> list[TransmissionReport]:
    types = {"mode": str, "trials": int, "block_errors": int}
    with Path(path).open(newline="") as fh:
        return [
            TransmissionReport(**{k: types.get(k, float)(v) for k, v in row.items()})
            for row in csv.DictReader(fh)
        ]
