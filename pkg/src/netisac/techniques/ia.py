"""Interference-alignment beam design for one multi-antenna transmitter.

With more antennas than CUs the sensing beam is placed exactly in the joint
null space of all CU channels and the communication beams are zero-forcing,
so every cross term vanishes.  When the antenna count equals the CU count the
null space is empty; the design falls back to alternating projection between
the ideal gain pattern and the set of achievable (rank-deficient) gain
matrices, reporting the strictly positive residual.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from ..interference import BeamPlan
from ..solvers import SolveReport, Status, alternating_projection

NULLING_RTOL = 1e-8


def _gain_matrix(
    cu_channels: Sequence[np.ndarray], sense_steering: np.ndarray, beams: np.ndarray
) -> np.ndarray:
    """Entry (i, j) is receiver i's gain from beam j (receivers: CUs then ST)."""
    c = np.vstack([np.asarray(h, dtype=complex).conj() for h in cu_channels]
                  + [np.asarray(sense_steering, dtype=complex).conj()])
    return c @ beams


def ia_residual(
    cu_channels: Sequence[np.ndarray], sense_steering: np.ndarray, beams: np.ndarray
) -> float:
    """Worst relative cross-gain |h_i^H b_j| (j != i) at the CUs.

    Covers multiuser interference and the sensing beam leaking into any CU;
    the sensing receiver hearing a communication beam is not an error here.
    """
    g = _gain_matrix(cu_channels, sense_steering, beams)
    norms_rx = np.array([np.linalg.norm(h) for h in cu_channels])
    norms_tx = np.linalg.norm(beams, axis=0)
    worst = 0.0
    for i in range(len(cu_channels)):
        for j in range(g.shape[1]):
            if i == j:
                continue
            denom = norms_rx[i] * norms_tx[j]
            if denom > 0:
                worst = max(worst, abs(g[i, j]) / denom)
    return worst


def ia_design(
    cu_channels: Sequence[np.ndarray],
    sense_steering: np.ndarray,
) -> Tuple[BeamPlan, List[complex], SolveReport]:
    """Null cross-interference between communication beams and the sensing beam.

    Returns a plan for a single transmitter (BS index 0), unit-modulus scalar
    decoders per CU, and a report whose extras carry the worst relative
    residual and, in the deficient case, the alternating-projection trace.
    """
    h_list = [np.asarray(h, dtype=complex) for h in cu_channels]
    a = np.asarray(sense_steering, dtype=complex)
    k = len(h_list)
    n_t = len(a)
    if any(len(h) != n_t for h in h_list):
        raise ValueError("all channels must have the transmitter's antenna count")

    if n_t > k:
        # Exact construction: zero-forcing comm beams, null-space sensing beam.
        h_mat = np.column_stack(h_list) if k else np.zeros((n_t, 0), dtype=complex)
        if k:
            zf = h_mat @ np.linalg.inv(h_mat.conj().T @ h_mat)
            w = zf / np.linalg.norm(zf, axis=0, keepdims=True)
        else:
            w = np.zeros((n_t, 0), dtype=complex)
        proj = np.eye(n_t) - (h_mat @ np.linalg.pinv(h_mat) if k else 0.0)
        v = proj @ a
        nv = np.linalg.norm(v)
        if nv < 1e-12 * np.linalg.norm(a):
            # Steering happens to lie in the CU span; any null-space vector works.
            _, s, vh = np.linalg.svd(h_mat.conj().T)
            v = vh[-1].conj()
        else:
            v = v / nv
        beams = np.column_stack([w, v[:, None]]) if k else v[:, None]
        residual = ia_residual(h_list, a, beams)
        report = SolveReport(
            status=Status.OPTIMAL,
            objective=residual,
            extras={"residual": residual, "exact": True},
        )
    else:
        # Deficient dimensions: alternate between the ideal gain pattern and
        # the achievable low-rank gain matrices, then map back to beams.
        c = np.vstack([h.conj() for h in h_list] + [a.conj()])
        d = np.array([np.linalg.norm(h) for h in h_list] + [np.linalg.norm(a)])
        ideal = np.diag(d.astype(complex))
        rank = int(np.linalg.matrix_rank(c))

        def project_ideal(_m: np.ndarray) -> np.ndarray:
            return ideal.copy()

        x0 = c @ (np.linalg.pinv(c) @ ideal)
        g_fit, ap_rep = alternating_projection(project_ideal, rank, x0)
        beams = np.linalg.pinv(c) @ g_fit
        norms = np.linalg.norm(beams, axis=0)
        norms[norms < 1e-15] = 1.0
        beams = beams / norms
        residual = ia_residual(h_list, a, beams)
        report = SolveReport(
            status=ap_rep.status,
            objective=residual,
            iterations=ap_rep.iterations,
            trace=ap_rep.trace,
            extras={"residual": residual, "exact": False, "gap": ap_rep.extras.get("gap")},
        )

    plan = BeamPlan()
    for j in range(k):
        plan.comm_beams[(0, j)] = beams[:, j]
    plan.sense_beams[0] = beams[:, -1]
    decoders = []
    for j in range(k):
        gain = complex(np.vdot(h_list[j], beams[:, j]))
        decoders.append(gain / abs(gain) if abs(gain) > 0 else 1.0 + 0.0j)
    return plan, decoders, report
