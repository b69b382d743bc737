"""Network geometry, array responses, path loss, and channel generation.

Everything here is a pure function of its inputs and an explicit seed.
Per-link fading is drawn from per-entity substreams of fixed length
(:data:`~netisac.constants.MAX_ANTENNAS` draws per link) so that a channel
realization for a small array is a prefix of the realization for a larger
array with the same seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from .constants import MAX_ANTENNAS, SPEED_OF_LIGHT, db_to_linear


# ---------------------------------------------------------------------------
# Scenario specification
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ScenarioSpec:
    """Static parameters of a network scenario.

    Distances are meters, frequencies Hz, powers watts, gains dB unless the
    field name says otherwise.
    """

    service_radius: float = 150.0
    n_bs: int = 4
    antennas_per_bs: Tuple[int, ...] | int = 8
    n_cu: int = 5
    n_st: int = 1
    n_clutter: int = 4
    carrier_freq: float = 2.4e9
    noise_power: float = 1e-13
    pathloss_exponent: float = 2.0
    si_cancellation_db: float = 100.0
    clutter_gain_range_db: Tuple[float, float] = (0.0, 10.0)
    rcs_gain_db: float = 30.0
    # Snapshot count entering the Fisher information of the angle estimate.
    # The source material never states it; it is reported with every result.
    snapshots: int = 64

    def __post_init__(self):
        if self.service_radius <= 0:
            raise ValueError("service_radius must be > 0")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be > 0")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be > 0")
        for name in ("n_bs", "n_cu", "n_st", "n_clutter"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")
        ants = self.antenna_counts()
        if len(ants) != self.n_bs:
            raise ValueError("antennas_per_bs length must equal n_bs")
        if any(a < 1 for a in ants):
            raise ValueError("antenna counts must be >= 1")
        if any(a > MAX_ANTENNAS for a in ants):
            raise ValueError(f"antenna counts capped at {MAX_ANTENNAS}")
        lo, hi = self.clutter_gain_range_db
        if lo > hi:
            raise ValueError("clutter_gain_range_db must be (low, high)")

    def antenna_counts(self) -> Tuple[int, ...]:
        if isinstance(self.antennas_per_bs, int):
            return (self.antennas_per_bs,) * self.n_bs
        return tuple(int(a) for a in self.antennas_per_bs)


# ---------------------------------------------------------------------------
# Array response
# ---------------------------------------------------------------------------
def steering_vector(n: int, theta: float) -> np.ndarray:
    """Half-wavelength ULA response, element m = exp(j*pi*m*sin(theta))."""
    if n < 1:
        raise ValueError("antenna count must be >= 1")
    m = np.arange(n)
    return np.exp(1j * np.pi * m * np.sin(theta))


def steering_derivative(n: int, theta: float) -> np.ndarray:
    """Elementwise d/d(theta) of :func:`steering_vector`."""
    if n < 1:
        raise ValueError("antenna count must be >= 1")
    m = np.arange(n)
    return 1j * np.pi * m * np.cos(theta) * steering_vector(n, theta)


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------
def path_loss_db(d: float, f: float, trips: str = "one_way") -> float:
    """Free-space Friis path loss; round trip is twice the one-way loss."""
    if d <= 0:
        raise ValueError("distance must be > 0")
    if f <= 0:
        raise ValueError("frequency must be > 0")
    one_way = 20.0 * math.log10(4.0 * math.pi * d * f / SPEED_OF_LIGHT)
    if trips == "one_way":
        return one_way
    if trips == "round_trip":
        return 2.0 * one_way
    raise ValueError(f"unknown trips value: {trips!r}")


def _path_loss_db_general(d: float, f: float, exponent: float) -> float:
    """One-way path loss with a configurable distance exponent.

    Reduces to Friis at exponent 2; the frequency-dependent constant is the
    Friis intercept either way.
    """
    if d <= 0:
        raise ValueError("distance must be > 0")
    intercept = 20.0 * math.log10(4.0 * math.pi * f / SPEED_OF_LIGHT)
    return intercept + 10.0 * exponent * math.log10(d)


def round_trip_delay(d: float) -> float:
    """Echo round-trip delay in seconds for a target at distance d."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    return 2.0 * d / SPEED_OF_LIGHT


# ---------------------------------------------------------------------------
# Scene geometry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Scene:
    """Node placement for one realization; reproducible from (spec, seed)."""

    bs_positions: np.ndarray  # (n_bs, 2)
    cu_positions: np.ndarray  # (n_cu, 2)
    st_positions: np.ndarray  # (n_st, 2)
    clutter_positions: np.ndarray  # (n_clutter, 2)
    bs_antennas: Tuple[int, ...]
    seed: int

    def broadside(self, b: int) -> np.ndarray:
        """Unit broadside direction of BS b's ULA (points at the disk center)."""
        p = self.bs_positions[b]
        r = np.linalg.norm(p)
        if r < 1e-9:
            return np.array([1.0, 0.0])
        return -p / r

    def angle_from_bs(self, b: int, point: np.ndarray) -> float:
        """Angle of `point` seen from BS b, folded into [-pi/2, pi/2].

        Measured against the array broadside; the fold reflects the inherent
        front-back ambiguity of a ULA.
        """
        u = self.broadside(b)
        d = np.asarray(point, dtype=float) - self.bs_positions[b]
        r = np.linalg.norm(d)
        if r < 1e-9:
            return 0.0
        d = d / r
        psi = math.atan2(u[0] * d[1] - u[1] * d[0], float(u @ d))
        return math.asin(math.sin(psi))

    def distance_from_bs(self, b: int, point: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(point, dtype=float) - self.bs_positions[b]))


def _disk_points(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=n))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def generate_scene(spec: ScenarioSpec, seed: int) -> Scene:
    """Draw node positions i.i.d. uniform over the service disk."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xA11CE)))
    bs = _disk_points(rng, spec.n_bs, spec.service_radius)
    cu = _disk_points(rng, spec.n_cu, spec.service_radius)
    st = _disk_points(rng, spec.n_st, spec.service_radius)
    cl = _disk_points(rng, spec.n_clutter, spec.service_radius)
    return Scene(
        bs_positions=bs,
        cu_positions=cu,
        st_positions=st,
        clutter_positions=cl,
        bs_antennas=spec.antenna_counts(),
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------
@dataclass
class ChannelSet:
    """All complex gains of one scene realization.

    Receive-scalar convention: a receiver with channel vector ``c`` observes
    ``c^H x`` when ``x`` is transmitted.  Far-field gain of an array toward
    angle theta is ``a(theta)^H x``.
    """

    comm: Dict[Tuple[int, int], np.ndarray]  # (bs, cu) -> (n_bs_b,)
    cross: Dict[Tuple[int, int], np.ndarray]  # (tx_bs, rx_bs) -> (n_rx, n_tx)
    st_amp: np.ndarray  # (n_bs, n_st) complex one-way BS<->ST amplitude
    st_angle: np.ndarray  # (n_bs, n_st) folded angle at the BS toward the ST
    reflect: np.ndarray  # (n_st,) complex, |.|^2 = rcs gain
    st_cu_amp: np.ndarray  # (n_st, n_cu) complex one-way ST->CU amplitude
    si_loop: np.ndarray  # (n_bs,) linear power gain of the SI loop
    leak: Dict[Tuple[int, int], np.ndarray]  # (bs, cu) -> composite channel
    clutter_angle: np.ndarray  # (n_bs, n_clutter)
    clutter_gain: np.ndarray  # (n_bs, n_clutter) complex, round trip folded in
    bs_antennas: Tuple[int, ...] = field(default_factory=tuple)
    seed: int = 0

    # -- steering helpers -------------------------------------------------
    def target_tx(self, b: int, t: int) -> np.ndarray:
        return steering_vector(self.bs_antennas[b], float(self.st_angle[b, t]))

    def target_rx(self, b: int, t: int) -> np.ndarray:
        # Same colocated array for transmit and receive.
        return self.target_tx(b, t)

    def target_tx_deriv(self, b: int, t: int) -> np.ndarray:
        return steering_derivative(self.bs_antennas[b], float(self.st_angle[b, t]))

    def target_rx_deriv(self, b: int, t: int) -> np.ndarray:
        return self.target_tx_deriv(b, t)

    def bistatic_alpha(self, tx_b: int, t: int, rx_b: int) -> complex:
        """Composite reflectivity-weighted amplitude tx -> target -> rx."""
        return complex(self.st_amp[tx_b, t] * self.reflect[t] * self.st_amp[rx_b, t])


def _link_fading(seed: int, tag: int, i: int, j: int, variance: float) -> np.ndarray:
    """CN(0, variance) draws of fixed length MAX_ANTENNAS for one link."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), tag, i, j)))
    z = rng.standard_normal(MAX_ANTENNAS) + 1j * rng.standard_normal(MAX_ANTENNAS)
    return z * math.sqrt(variance / 2.0)


def generate_channels(scene: Scene, spec: ScenarioSpec, seed: int) -> ChannelSet:
    """Draw a full channel realization, deterministic in (scene, spec, seed)."""
    if scene.bs_antennas != spec.antenna_counts():
        raise RuntimeError("scene antenna counts inconsistent with spec")
    n_bs, n_cu, n_st, n_cl = spec.n_bs, spec.n_cu, spec.n_st, spec.n_clutter
    f = spec.carrier_freq
    gamma = spec.pathloss_exponent

    def ow_amp2(d: float) -> float:
        return db_to_linear(-_path_loss_db_general(max(d, 1.0), f, gamma))

    comm: Dict[Tuple[int, int], np.ndarray] = {}
    for b in range(n_bs):
        nb = scene.bs_antennas[b]
        for k in range(n_cu):
            d = scene.distance_from_bs(b, scene.cu_positions[k])
            comm[(b, k)] = _link_fading(seed, 1, b, k, ow_amp2(d))[:nb]

    cross: Dict[Tuple[int, int], np.ndarray] = {}
    for b in range(n_bs):
        for b2 in range(n_bs):
            if b == b2:
                continue
            d = scene.distance_from_bs(b, scene.bs_positions[b2])
            var = ow_amp2(d)
            n_tx, n_rx = scene.bs_antennas[b], scene.bs_antennas[b2]
            flat = _link_fading(seed, 2, b, b2, var)
            # Need n_rx*n_tx draws; extend deterministically if one block is short.
            blocks = [flat]
            extra = 3
            while sum(len(x) for x in blocks) < n_rx * n_tx:
                blocks.append(_link_fading(seed, 2000 + extra, b, b2, var))
                extra += 1
            full = np.concatenate(blocks)[: n_rx * n_tx]
            cross[(b, b2)] = full.reshape(n_rx, n_tx)

    # BS <-> ST line-of-sight amplitudes and angles.
    st_amp = np.zeros((n_bs, n_st), dtype=complex)
    st_angle = np.zeros((n_bs, n_st))
    phase_rng = np.random.default_rng(np.random.SeedSequence((int(seed), 3)))
    for b in range(n_bs):
        for t in range(n_st):
            d = scene.distance_from_bs(b, scene.st_positions[t])
            st_angle[b, t] = scene.angle_from_bs(b, scene.st_positions[t])
            st_amp[b, t] = math.sqrt(ow_amp2(d)) * np.exp(1j * phase_rng.uniform(0, 2 * np.pi))

    reflect = math.sqrt(db_to_linear(spec.rcs_gain_db)) * np.exp(
        1j * phase_rng.uniform(0, 2 * np.pi, size=n_st)
    )

    st_cu_amp = np.zeros((n_st, n_cu), dtype=complex)
    for t in range(n_st):
        for k in range(n_cu):
            d = float(np.linalg.norm(scene.st_positions[t] - scene.cu_positions[k]))
            st_cu_amp[t, k] = math.sqrt(ow_amp2(d)) * np.exp(
                1j * phase_rng.uniform(0, 2 * np.pi)
            )

    si_loop = np.ones(n_bs)

    # Composite sensing-to-user channels: direct path plus one target bounce.
    leak: Dict[Tuple[int, int], np.ndarray] = {}
    for b in range(n_bs):
        for k in range(n_cu):
            q = comm[(b, k)].copy()
            for t in range(n_st):
                alpha = st_amp[b, t] * reflect[t] * st_cu_amp[t, k]
                q = q + np.conj(alpha) * steering_vector(
                    scene.bs_antennas[b], float(st_angle[b, t])
                )
            leak[(b, k)] = q

    clutter_angle = np.zeros((n_bs, n_cl))
    clutter_gain = np.zeros((n_bs, n_cl), dtype=complex)
    cl_rng = np.random.default_rng(np.random.SeedSequence((int(seed), 4)))
    lo, hi = spec.clutter_gain_range_db
    for b in range(n_bs):
        for c in range(n_cl):
            clutter_angle[b, c] = scene.angle_from_bs(b, scene.clutter_positions[c])
            d = scene.distance_from_bs(b, scene.clutter_positions[c])
            rt_amp2 = ow_amp2(d) ** 2
            g = db_to_linear(cl_rng.uniform(lo, hi)) * rt_amp2
            clutter_gain[b, c] = math.sqrt(g) * np.exp(1j * cl_rng.uniform(0, 2 * np.pi))

    return ChannelSet(
        comm=comm,
        cross=cross,
        st_amp=st_amp,
        st_angle=st_angle,
        reflect=reflect,
        st_cu_amp=st_cu_amp,
        si_loop=si_loop,
        leak=leak,
        clutter_angle=clutter_angle,
        clutter_gain=clutter_gain,
        bs_antennas=scene.bs_antennas,
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# Debug dumps
# ---------------------------------------------------------------------------
def scene_to_text(scene: Scene) -> str:
    """JSON dump of a scene for debugging; stable key order."""
    payload = {
        "seed": scene.seed,
        "bs_antennas": list(scene.bs_antennas),
        "bs_positions": scene.bs_positions.tolist(),
        "cu_positions": scene.cu_positions.tolist(),
        "st_positions": scene.st_positions.tolist(),
        "clutter_positions": scene.clutter_positions.tolist(),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def channels_to_text(ch: ChannelSet) -> str:
    """JSON dump of channel magnitudes/angles for debugging."""

    def cplx(arr: np.ndarray):
        a = np.asarray(arr)
        return {"re": a.real.tolist(), "im": a.imag.tolist()}

    payload = {
        "seed": ch.seed,
        "bs_antennas": list(ch.bs_antennas),
        "comm": {f"{b},{k}": cplx(v) for (b, k), v in sorted(ch.comm.items())},
        "st_amp": cplx(ch.st_amp),
        "st_angle": ch.st_angle.tolist(),
        "reflect": cplx(ch.reflect),
        "si_loop": ch.si_loop.tolist(),
        "clutter_angle": ch.clutter_angle.tolist(),
        "clutter_gain": cplx(ch.clutter_gain),
    }
    return json.dumps(payload, indent=2, sort_keys=True)
