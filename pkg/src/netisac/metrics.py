"""Communication and sensing quality metrics.

SINR, achievable rate, echo power, sensing SINR, angle CRLB, beampattern
and its mismatch.  dBm <-> watt conversions are centralized here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .constants import dbm_to_watts, watts_to_dbm  # re-exported on purpose
from .interference import BeamPlan, mui_power, sensing_leakage_power
from .scene import ChannelSet, ScenarioSpec


class NonIdentifiableError(ValueError):
    """Fisher information is numerically zero; the CRLB is unbounded."""


# ---------------------------------------------------------------------------
# QoS targets
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class QosTargets:
    """Per-experiment quality targets.

    At most one of (sinr_min_db, rate_min) should be active in an experiment.
    """

    sinr_min_db: Optional[float] = None  # per CU
    rate_min: Optional[float] = None  # bits/s/Hz per CU
    crlb_max: Optional[float] = None  # rad^2 per ST (normalized units)
    echo_min: Optional[float] = None  # watts per ST
    power_budget: float = 1.0  # watts per BS
    fronthaul_cap: Optional[float] = None  # bits/s/Hz per RRH

    def __post_init__(self):
        if self.sinr_min_db is not None and self.rate_min is not None:
            raise ValueError("at most one of sinr_min_db / rate_min may be set")
        for name in ("sinr_min_db", "rate_min", "crlb_max", "echo_min", "fronthaul_cap"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
        if not math.isfinite(self.power_budget) or self.power_budget < 0:
            raise ValueError("power_budget must be finite and >= 0")


# ---------------------------------------------------------------------------
# Communication metrics
# ---------------------------------------------------------------------------
def comm_sinr(
    k: int, channels: ChannelSet, plan: BeamPlan, spec: ScenarioSpec
) -> float:
    """Downlink SINR of CU k under the given beam plan.

    Desired power uses the direct channel; interference uses the composite
    (target-bounce) leak channels, so delayed reflections count as MUI.
    """
    serving = [(b, kk) for (b, kk) in plan.comm_beams if kk == k]
    if len(serving) != 1:
        raise ValueError(f"CU {k} must have exactly one serving beam, got {len(serving)}")
    b, _ = serving[0]
    h = channels.comm[(b, k)]
    w = plan.comm_beams[(b, k)]
    desired = abs(np.vdot(h, w)) ** 2
    q_by_bs = {bb: channels.leak[(bb, k)] for bb in range(len(channels.bs_antennas))}
    interference = mui_power(q_by_bs, plan, serving=(b, k))
    interference += sensing_leakage_power(q_by_bs, plan)
    return float(desired / (interference + spec.noise_power))


def achievable_rate(sinr: float, tau: float = 1.0) -> float:
    """Time-share scaled spectral efficiency, bits/s/Hz."""
    if sinr < 0:
        raise ValueError("SINR must be >= 0")
    if not 0.0 <= tau <= 1.0:
        raise ValueError("time fraction must lie in [0, 1]")
    return tau * math.log2(1.0 + sinr)


# ---------------------------------------------------------------------------
# Sensing metrics
# ---------------------------------------------------------------------------
def echo_power(
    r_tx: np.ndarray,
    alpha: complex,
    a_t: np.ndarray,
    a_r: np.ndarray,
    u: np.ndarray,
) -> float:
    """Received target-echo power through a (normalized) combiner."""
    nu = np.linalg.norm(u)
    if nu == 0:
        raise ValueError("zero combiner")
    rx_gain = abs(np.vdot(u, a_r)) ** 2 / nu**2
    tx_gain = float((a_t.conj() @ r_tx @ a_t).real)
    return abs(alpha) ** 2 * rx_gain * tx_gain


def sensing_sinr(
    echo: float, clutter: float, crosstalk: float, si: float, sigma2: float
) -> float:
    return echo / (clutter + crosstalk + si + sigma2)


def fisher_information(
    r_tx: np.ndarray,
    alpha: complex,
    snapshots: int,
    sigma2: float,
    a_t: np.ndarray,
    da_t: np.ndarray,
    a_r: np.ndarray,
    da_r: np.ndarray,
) -> float:
    """Fisher information of the target angle.

    Deterministic-waveform point-target model with mean
    ``mu(theta) = alpha * a_r(theta) a_t(theta)^H X`` and sample covariance
    ``R = X X^H / L``; the information is linear in ``r_tx``.
    """
    g = (
        float(np.vdot(da_r, da_r).real) * (a_t.conj() @ r_tx @ a_t)
        + np.vdot(a_r, da_r) * (a_t.conj() @ r_tx @ da_t)
        + np.vdot(da_r, a_r) * (da_t.conj() @ r_tx @ a_t)
        + float(np.vdot(a_r, a_r).real) * (da_t.conj() @ r_tx @ da_t)
    )
    return float(2.0 * snapshots * abs(alpha) ** 2 / sigma2 * g.real)


def crlb_angle(
    r_tx: np.ndarray,
    alpha: complex,
    snapshots: int,
    sigma2: float,
    a_t: np.ndarray,
    da_t: np.ndarray,
    a_r: np.ndarray,
    da_r: np.ndarray,
) -> float:
    """Angle-estimation CRLB in rad^2; raises if the angle is unidentifiable."""
    j = fisher_information(r_tx, alpha, snapshots, sigma2, a_t, da_t, a_r, da_r)
    if j <= 1e-15:
        raise NonIdentifiableError("Fisher information is numerically zero")
    return 1.0 / j


def fisher_matrix(
    a_t: np.ndarray, da_t: np.ndarray, a_r: np.ndarray, da_r: np.ndarray
) -> np.ndarray:
    """PSD matrix M with J = (2 L |alpha|^2 / sigma^2) * tr(M R).

    M = G^H G with G = da_r a_t^H + a_r da_t^H; useful for making the
    information a sum of squared norms of the transmit beams.
    """
    g = np.outer(da_r, a_t.conj()) + np.outer(a_r, da_t.conj())
    return g.conj().T @ g


# ---------------------------------------------------------------------------
# Beampattern
# ---------------------------------------------------------------------------
def beampattern(r_tx: np.ndarray, theta: Union[float, np.ndarray]) -> np.ndarray:
    """Transmit power pattern a(theta)^H R a(theta) on one or many angles."""
    from .scene import steering_vector

    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    n = r_tx.shape[0]
    out = np.empty(len(thetas))
    for i, th in enumerate(thetas):
        a = steering_vector(n, float(th))
        out[i] = float((a.conj() @ r_tx @ a).real)
    return out if np.ndim(theta) else float(out[0])


def beampattern_mse(
    r_tx: np.ndarray, grid: np.ndarray, ideal: np.ndarray
) -> float:
    """Mean squared mismatch to an ideal pattern sampled on a grid."""
    grid = np.asarray(grid, dtype=float)
    ideal = np.asarray(ideal, dtype=float)
    if grid.shape != ideal.shape:
        raise ValueError("grid and ideal level arrays must have equal shape")
    p = beampattern(r_tx, grid)
    return float(np.mean((p - ideal) ** 2))
