"""Bilinear-transform reformulation of products u = tau * p.

The product of a time fraction tau in [0, 1] and a power p in [0, P] is
replaced by an auxiliary u pinned by (a) the McCormick linear envelope and
(b) the difference-of-squares identity tau*p = ((tau+p)^2 - (tau-p)^2)/4
split into two inequalities whose concave sides are linearized around the
current iterate (SCA).  Both are tight at convergence, so u = tau*p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .conic import SecondOrderCone


def _quad_le_affine_soc(
    n: int, quad_row: np.ndarray, affine_row: np.ndarray, affine_const: float
) -> SecondOrderCone:
    """SOC for (quad_row @ x)^2 / 4 <= affine_row @ x + affine_const.

    Uses d^2 <= 4a  <=>  ||[d, a - 1]|| <= a + 1.
    """
    a_mat = np.vstack([quad_row, affine_row])
    b_vec = np.array([0.0, affine_const - 1.0])
    return SecondOrderCone(A=a_mat, b=b_vec, c=affine_row.copy(), d=affine_const + 1.0)


@dataclass(frozen=True)
class BilinearEnvelope:
    """Constraint factory for one product u = tau * p with p in [0, p_max]."""

    p_max: float

    def mccormick_rows(
        self, n: int, i_tau: int, i_p: int, i_u: int
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Linear envelope: u <= P*tau, u <= p, u >= p + P*tau - P, u >= 0."""
        g = np.zeros((4, n))
        h = np.zeros(4)
        g[0, i_u], g[0, i_tau] = 1.0, -self.p_max
        g[1, i_u], g[1, i_p] = 1.0, -1.0
        g[2, i_u], g[2, i_p], g[2, i_tau], h[2] = -1.0, 1.0, self.p_max, self.p_max
        g[3, i_u] = -1.0
        return g, h

    def surrogate_socs(
        self, n: int, i_tau: int, i_p: int, i_u: int, tau0: float, p0: float
    ) -> List[SecondOrderCone]:
        """Convex surrogate of the two difference-of-squares inequalities.

        Tight at (tau0, p0); every surrogate-feasible point satisfies the
        original nonconvex constraints (inner approximation).
        """
        s0 = tau0 + p0
        d0 = tau0 - p0
        s_row = np.zeros(n)
        s_row[i_tau] += 1.0
        s_row[i_p] += 1.0
        d_row = np.zeros(n)
        d_row[i_tau] += 1.0
        d_row[i_p] -= 1.0
        u_row = np.zeros(n)
        u_row[i_u] = 1.0

        # (tau - p)^2 / 4 <= (2 s0 (tau+p) - s0^2) / 4 - u
        aff1 = 0.5 * s0 * s_row - u_row
        soc1 = _quad_le_affine_soc(n, d_row, aff1, -0.25 * s0**2)
        # (tau + p)^2 / 4 <= u + (2 d0 (tau-p) - d0^2) / 4
        aff2 = u_row + 0.5 * d0 * d_row
        soc2 = _quad_le_affine_soc(n, s_row, aff2, -0.25 * d0**2)
        return [soc1, soc2]

    def residual(self, tau: float, p: float, u: float) -> float:
        return abs(u - tau * p)


def bilinear_reformulate(p_max: float) -> BilinearEnvelope:
    """Build the reformulation for u = tau * p with 0<=tau<=1, 0<=p<=p_max."""
    if p_max <= 0:
        raise ValueError("p_max must be > 0")
    return BilinearEnvelope(p_max=p_max)
