"""Common result object returned by every solver kernel."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

FEASIBILITY_TOL = 1e-7


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class SolveReport:
    status: Status
    objective: float = float("nan")
    x: Optional[np.ndarray] = None
    iterations: int = 0
    max_violation: float = 0.0
    trace: List[float] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)
    feas_tol: float = FEASIBILITY_TOL

    def __post_init__(self):
        if self.status == Status.OPTIMAL and self.max_violation > self.feas_tol:
            raise ValueError(
                f"optimal status with violation {self.max_violation:.2e} "
                f"above tolerance {self.feas_tol:.0e}"
            )

    @property
    def ok(self) -> bool:
        return self.status == Status.OPTIMAL
