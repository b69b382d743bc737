"""Monte-Carlo sweep result container."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

Z_95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass
class SweepResult:
    """Curves over one sweep axis, one entry per (scheme, axis point).

    ``curves`` holds infeasibility rates in [0, 1] (case A) or mean energies
    in joules (case B); ``failures`` counts solver breakdowns separately from
    honest infeasibility; ``ci_halfwidth`` is the 95% normal-approximation
    half-width.  ``seeds`` allows exact replay.
    """

    axis: List[float]
    curves: Dict[str, List[float]] = field(default_factory=dict)
    failures: Dict[str, List[float]] = field(default_factory=dict)
    ci_halfwidth: Dict[str, List[float]] = field(default_factory=dict)
    n_setups: int = 0
    seeds: List[int] = field(default_factory=list)

    def validate(self) -> None:
        if not self.axis:
            raise ValueError("empty sweep axis")
        for name, vals in self.curves.items():
            if len(vals) != len(self.axis):
                raise ValueError(f"curve {name!r} length mismatch")


def binomial_halfwidth(p: float, n: int) -> float:
    """95% normal-approximation half-width of a rate estimate."""
    if n <= 0:
        return float("nan")
    return Z_95 * float(np.sqrt(max(p * (1.0 - p), 0.0) / n))


def mean_halfwidth(values: np.ndarray) -> float:
    """95% normal-approximation half-width of a sample mean."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n <= 1:
        return float("nan")
    return Z_95 * float(values.std(ddof=1) / np.sqrt(n))


def derive_seeds(master_seed: int, n: int) -> List[int]:
    """Deterministic per-setup seeds from one master seed."""
    state = np.random.SeedSequence(int(master_seed)).generate_state(n, dtype=np.uint32)
    return [int(s) for s in state]
