"""Closed-form power bookkeeping for every interference type.

All functions are pure and work at the covariance/power level; no waveforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple, Union

import numpy as np

from .constants import db_to_linear
from .scene import ChannelSet, steering_vector


# ---------------------------------------------------------------------------
# Beam plan
# ---------------------------------------------------------------------------
@dataclass
class BeamPlan:
    """Per-BS transmit beams, sensing covariances, and receive combiners.

    ``comm_beams[(b, k)]`` is the beam BS ``b`` uses for CU ``k`` (amplitude
    scale, watts^0.5).  Sensing transmissions are either rank-one beams
    ``sense_beams[b]`` or covariance matrices ``sense_cov[b]``; a BS may carry
    both.  ``combiners[b]`` is the receive vector of an echo-collecting BS.
    """

    comm_beams: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict)
    sense_beams: Dict[int, np.ndarray] = field(default_factory=dict)
    sense_cov: Dict[int, np.ndarray] = field(default_factory=dict)
    combiners: Dict[int, np.ndarray] = field(default_factory=dict)

    PSD_TOL = 1e-9

    def validate(self, bs_antennas) -> None:
        for (b, k), w in self.comm_beams.items():
            if len(w) != bs_antennas[b]:
                raise ValueError(f"comm beam ({b},{k}) has wrong dimension")
        for b, v in self.sense_beams.items():
            if len(v) != bs_antennas[b]:
                raise ValueError(f"sense beam {b} has wrong dimension")
        for b, r in self.sense_cov.items():
            if r.shape != (bs_antennas[b], bs_antennas[b]):
                raise ValueError(f"sense covariance {b} has wrong shape")
            if np.linalg.norm(r - r.conj().T) > 1e-8 * max(1.0, np.linalg.norm(r)):
                raise ValueError(f"sense covariance {b} is not Hermitian")
            if np.linalg.eigvalsh((r + r.conj().T) / 2).min() < -self.PSD_TOL:
                raise ValueError(f"sense covariance {b} is not PSD")

    def tx_power(self, b: int) -> float:
        """Total transmit power of BS b."""
        p = sum(
            float(np.vdot(w, w).real) for (bb, _), w in self.comm_beams.items() if bb == b
        )
        if b in self.sense_beams:
            v = self.sense_beams[b]
            p += float(np.vdot(v, v).real)
        if b in self.sense_cov:
            p += float(np.trace(self.sense_cov[b]).real)
        return p

    def total_power(self) -> float:
        bs = {b for (b, _) in self.comm_beams}
        bs |= set(self.sense_beams) | set(self.sense_cov)
        return sum(self.tx_power(b) for b in bs)

    def tx_covariance(self, b: int, n: int) -> np.ndarray:
        """Covariance of everything BS b transmits."""
        r = np.zeros((n, n), dtype=complex)
        for (bb, _), w in self.comm_beams.items():
            if bb == b:
                r += np.outer(w, w.conj())
        if b in self.sense_beams:
            v = self.sense_beams[b]
            r += np.outer(v, v.conj())
        if b in self.sense_cov:
            r += self.sense_cov[b]
        return r


ChannelArg = Union[np.ndarray, Mapping[int, np.ndarray]]


def _chan_for(h: ChannelArg, b: int) -> np.ndarray:
    """Resolve a per-BS channel: mapping indexed by BS, or one shared vector."""
    if isinstance(h, Mapping):
        return h[b]
    return h


# ---------------------------------------------------------------------------
# Interference powers
# ---------------------------------------------------------------------------
def mui_power(h_k: ChannelArg, plan: BeamPlan, serving: Tuple[int, int]) -> float:
    """Multiuser interference power at a CU with channel(s) ``h_k``.

    Sums |h^H w|^2 over every communication beam except the serving one.
    Pass the leak-channel variant of ``h_k`` to include target-bounce MUI.
    """
    total = 0.0
    for (b, k), w in plan.comm_beams.items():
        if (b, k) == serving:
            continue
        h = _chan_for(h_k, b)
        if len(h) != len(w):
            raise ValueError(f"channel/beam dimension mismatch for beam ({b},{k})")
        total += abs(np.vdot(h, w)) ** 2
    return float(total)


def sensing_leakage_power(q_k: ChannelArg, plan: BeamPlan) -> float:
    """Power a CU receives from all sensing transmissions."""
    total = 0.0
    for b, v in plan.sense_beams.items():
        q = _chan_for(q_k, b)
        if len(q) != len(v):
            raise ValueError(f"channel/beam dimension mismatch for sense beam {b}")
        total += abs(np.vdot(q, v)) ** 2
    for b, r in plan.sense_cov.items():
        q = _chan_for(q_k, b)
        if len(q) != r.shape[0]:
            raise ValueError(f"channel/covariance dimension mismatch for BS {b}")
        total += float((q.conj() @ r @ q).real)
    return float(total)


def residual_si_power(p_tx: float, g_si: float, chi_db: float) -> float:
    """Self-interference power left after chi_db of cancellation."""
    if p_tx < 0:
        raise ValueError("transmit power must be >= 0")
    return p_tx * g_si * db_to_linear(-chi_db)


def _combiner(plan: BeamPlan, b: int) -> np.ndarray:
    if b not in plan.combiners:
        raise ValueError(f"no combiner at receive BS {b}")
    u = plan.combiners[b]
    nu = np.linalg.norm(u)
    if nu == 0:
        raise ValueError(f"zero combiner at BS {b}")
    return u / nu


def crosstalk_power(receiver: int, plan: BeamPlan, channels: ChannelSet) -> float:
    """Power receiver BS hears from all other BSs' transmissions."""
    u = _combiner(plan, receiver)
    total = 0.0
    tx_bs = {b for (b, _) in plan.comm_beams} | set(plan.sense_beams) | set(plan.sense_cov)
    for b in tx_bs:
        if b == receiver:
            continue
        h_mat = channels.cross[(b, receiver)]
        g = h_mat.conj().T @ u  # effective channel row seen through the combiner
        for (bb, _), w in plan.comm_beams.items():
            if bb == b:
                total += abs(np.vdot(g, w)) ** 2
        if b in plan.sense_beams:
            total += abs(np.vdot(g, plan.sense_beams[b])) ** 2
        if b in plan.sense_cov:
            total += float((g.conj() @ plan.sense_cov[b] @ g).real)
    return float(total)


def clutter_power(receiver: int, plan: BeamPlan, channels: ChannelSet) -> float:
    """Echo power from clutter scatterers of the receiver's own transmission."""
    u = _combiner(plan, receiver)
    n = channels.bs_antennas[receiver]
    r_tot = plan.tx_covariance(receiver, n)
    if not np.any(r_tot):
        return 0.0
    total = 0.0
    for c in range(channels.clutter_angle.shape[1]):
        phi = float(channels.clutter_angle[receiver, c])
        beta2 = abs(channels.clutter_gain[receiver, c]) ** 2
        a = steering_vector(n, phi)
        rx_gain = abs(np.vdot(u, a)) ** 2
        tx_gain = float((a.conj() @ r_tot @ a).real)
        total += beta2 * rx_gain * tx_gain
    return float(total)
