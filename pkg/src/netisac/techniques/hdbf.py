"""Hybrid detection beamforming: flat-top transmit beampattern shaping.

Minimizes the mean squared mismatch between the transmit beampattern
a(theta)^H R a(theta) and an ideal flat-top pattern (level P*n inside the
mainlobe window, zero outside) over PSD covariances with a trace budget.
The objective is convex quadratic in R, so projected gradient on the PSD
cone converges to the global optimum; optional sidelobe caps at known
clutter angles enter as convex hinge penalties.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from ..metrics import beampattern_mse
from ..scene import steering_vector
from ..solvers import SolveReport, projected_gradient_psd

DEFAULT_SIDELOBE_CAP_FRAC = 0.05
SIDELOBE_PENALTY = 100.0


def flat_top_ideal(
    n: int, grid: np.ndarray, window: Tuple[float, float], power: float
) -> np.ndarray:
    """Ideal pattern: peak array gain power*n inside the window, 0 outside."""
    lo, hi = window
    if not lo < hi:
        raise ValueError("mainlobe window must be a non-empty angle interval")
    grid = np.asarray(grid, dtype=float)
    return np.where((grid >= lo) & (grid <= hi), power * n, 0.0)


def hdbf_design(
    n: int,
    window: Tuple[float, float],
    grid: np.ndarray,
    power: float,
    clutter_angles: Optional[Sequence[float]] = None,
    tol: float = 1e-12,
    max_iter: int = 5000,
) -> Tuple[np.ndarray, SolveReport]:
    """Flat-top covariance design; returns (R, report with MSE trace)."""
    if n < 1:
        raise ValueError("need at least one antenna")
    if power <= 0:
        raise ValueError("power budget must be > 0")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty angle grid")
    ideal = flat_top_ideal(n, grid, window, power)

    steer = np.column_stack([steering_vector(n, th) for th in grid])  # n x M
    m = grid.size
    cl_steer = None
    cap = DEFAULT_SIDELOBE_CAP_FRAC * power * n
    if clutter_angles:
        cl_steer = np.column_stack([steering_vector(n, th) for th in clutter_angles])

    def pattern(r: np.ndarray, a_cols: np.ndarray) -> np.ndarray:
        return np.einsum("im,ij,jm->m", a_cols.conj(), r, a_cols).real

    def objective(r: np.ndarray) -> float:
        f = float(np.mean((pattern(r, steer) - ideal) ** 2))
        if cl_steer is not None:
            excess = np.clip(pattern(r, cl_steer) - cap, 0.0, None)
            f += SIDELOBE_PENALTY * float(np.sum(excess**2))
        return f

    def gradient(r: np.ndarray) -> np.ndarray:
        resid = pattern(r, steer) - ideal
        g = (steer * (2.0 * resid / m)) @ steer.conj().T
        if cl_steer is not None:
            excess = np.clip(pattern(r, cl_steer) - cap, 0.0, None)
            g += (cl_steer * (2.0 * SIDELOBE_PENALTY * excess)) @ cl_steer.conj().T
        return g

    r0 = (power / n) * np.eye(n, dtype=complex)
    r, rep = projected_gradient_psd(
        objective, gradient, r0, trace_cap=power, tol=tol, max_iter=max_iter
    )
    rep.extras["mse"] = beampattern_mse(r, grid, ideal)
    rep.extras["isotropic_mse"] = beampattern_mse(r0, grid, ideal)
    return r, rep
