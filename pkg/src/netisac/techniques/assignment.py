"""Discrete resource-assignment container shared by all techniques."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np


@dataclass
class Assignment:
    """Binary selections plus the frame time split.

    ``rx_select[b] = 1`` marks the echo-receiving BS (at most one),
    ``user_assoc[b, k] = 1`` means BS b serves CU k (each CU exactly one BS,
    per-BS cardinality cap), ``subcarrier_assign[t, n] = 1`` gives subcarrier
    n to task t, and ``time_split = (tau_c, tau_s)`` with tau_c + tau_s <= 1.
    """

    rx_select: Optional[np.ndarray] = None
    user_assoc: Optional[np.ndarray] = None
    subcarrier_assign: Optional[np.ndarray] = None
    time_split: Optional[Tuple[float, float]] = None
    k_max: Optional[int] = None

    def validate(self) -> None:
        if self.rx_select is not None:
            rs = np.asarray(self.rx_select)
            if not np.all(np.isin(rs, (0, 1))):
                raise ValueError("rx_select must be binary")
            if rs.sum() > 1:
                raise ValueError("at most one receive BS")
        if self.user_assoc is not None:
            ua = np.asarray(self.user_assoc)
            if not np.all(np.isin(ua, (0, 1))):
                raise ValueError("user_assoc must be binary")
            if not np.all(ua.sum(axis=0) == 1):
                raise ValueError("each CU must be served by exactly one BS")
            if self.k_max is not None and np.any(ua.sum(axis=1) > self.k_max):
                raise ValueError("per-BS cardinality cap exceeded")
        if self.subcarrier_assign is not None:
            sa = np.asarray(self.subcarrier_assign)
            if not np.all(np.isin(sa, (0, 1))):
                raise ValueError("subcarrier_assign must be binary")
        if self.time_split is not None:
            tc, ts = self.time_split
            if tc < -1e-12 or ts < -1e-12 or tc + ts > 1.0 + 1e-9:
                raise ValueError("time split fractions must be >= 0 with sum <= 1")

    @property
    def rx_bs(self) -> Optional[int]:
        if self.rx_select is None or self.rx_select.sum() == 0:
            return None
        return int(np.argmax(self.rx_select))

    def serving_bs(self, k: int) -> int:
        if self.user_assoc is None:
            raise ValueError("no user association present")
        return int(np.argmax(self.user_assoc[:, k]))
