from __future__ import annotations

from dataclasses import dataclass, fields

MODES = ("uniform", "sparse_dense", "bootstrap")


@dataclass(frozen=True)
class TransmissionReport:
    """Outcome of one Monte Carlo operating point plus its analytic rates and gains."""

    epsilon: float
    code_rate: float
    mode: str
    trials: int
    block_errors: int
    p_b: float
    capacity: float
    shaping_gain: float
    coding_gain: float
    effective_rate: float
    mi_rate: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]
