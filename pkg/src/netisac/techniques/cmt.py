"""Coordinated multipoint transmission design.

Joint receive-BS selection, user association, and beamforming that minimizes
total transmit power under per-CU SINR, per-ST CRLB, per-BS power, and
cardinality constraints.  The receive BS is enumerated (it transmits
nothing); the association binaries are relaxed and driven to {0,1} with the
penalty method inside an SCA loop; the CRLB constraint is linearized around
the previous iterate.  A certified infeasibility verdict comes from an outer
relaxation that upper-bounds the attainable Fisher information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import db_to_linear
from ..interference import (
    BeamPlan,
    clutter_power,
    crosstalk_power,
    residual_si_power,
)
from ..metrics import QosTargets, comm_sinr, fisher_matrix
from ..scene import ChannelSet, ScenarioSpec, Scene, steering_vector
from ..solvers import (
    ConicProblem,
    SolveReport,
    Status,
    penalize_binary,
    sca_minimize,
    solve_conic,
)
from ._socp import Layout, soc_norm_le_affine, soc_sumsq_le_affine
from .assignment import Assignment

VERIFY_RTOL = 1e-6


@dataclass
class CmtOptions:
    """Structural restrictions used to express the case-study baselines."""

    rx_candidates: Optional[Sequence[int]] = None
    fixed_assoc: Optional[np.ndarray] = None  # (n_bs, n_cu) binary
    sense_tx: Optional[Sequence[int]] = None  # BSs allowed to transmit sensing
    rx_transmits_sensing: bool = False  # monostatic architecture
    sca_tol: float = 1e-6
    sca_max_iter: int = 25


Point = Dict[str, object]  # {'w': {(b,k): vec}, 'v': {b: vec}, 'x': array|None}


class _CmtContext:
    """One subproblem family: fixed receive BS, fixed structural sets."""

    def __init__(
        self,
        scene: Scene,
        channels: ChannelSet,
        spec: ScenarioSpec,
        targets: QosTargets,
        k_max: int,
        rx: Optional[int],
        comm_tx: Sequence[int],
        sense_tx: Sequence[int],
        relaxed: bool,
        assoc: Optional[np.ndarray] = None,
    ):
        self.scene = scene
        self.ch = channels
        self.spec = spec
        self.targets = targets
        self.k_max = k_max
        self.rx = rx
        self.comm_tx = list(comm_tx)
        self.sense_tx = list(sense_tx)
        self.relaxed = relaxed
        self.assoc = assoc
        self.n_cu = spec.n_cu
        self.n_st = spec.n_st
        self.sigma2 = spec.noise_power
        # Row scaling: noise-level constraints are ~1e-13 W, far below the
        # solver's absolute tolerances, so each SOC is normalized to O(1).
        self.sig_amp = math.sqrt(spec.noise_power)
        self.gamma = db_to_linear(targets.sinr_min_db) if targets.sinr_min_db is not None else None
        self.p_max = targets.power_budget

        lay = Layout()
        self.beam_pairs: List[Tuple[int, int]] = []
        if relaxed:
            for b in self.comm_tx:
                for k in range(self.n_cu):
                    self.beam_pairs.append((b, k))
        else:
            for k in range(self.n_cu):
                b = int(np.argmax(assoc[:, k]))
                self.beam_pairs.append((b, k))
        for b, k in self.beam_pairs:
            lay.add_complex(f"w_{b}_{k}", channels.bs_antennas[b])
        for b in self.sense_tx:
            lay.add_complex(f"v_{b}", channels.bs_antennas[b])
        self.active_bs = sorted(set(b for b, _ in self.beam_pairs) | set(self.sense_tx))
        lay.add_real("p", len(self.active_bs))
        if relaxed:
            lay.add_real("x", len(self.comm_tx) * self.n_cu)
        self.lay = lay

        # Sensing geometry (only when a ST and CRLB target are present).
        self.sensing_on = (
            self.n_st > 0 and targets.crlb_max is not None and rx is not None
        )
        if self.sensing_on:
            self._prepare_sensing()

    # -- sensing precomputation --------------------------------------------
    def _prepare_sensing(self) -> None:
        ch, rx = self.ch, self.rx
        n_rx = ch.bs_antennas[rx]
        self.u_rx = ch.target_rx(rx, 0) / math.sqrt(n_rx)
        self.contrib_bs = sorted(set(self.active_bs))
        # G matrices and composite gains per (st, tx BS)
        self.g_mats: Dict[Tuple[int, int], np.ndarray] = {}
        self.kappas: Dict[Tuple[int, int], float] = {}
        for t in range(self.n_st):
            a_r = ch.target_rx(rx, t)
            da_r = ch.target_rx_deriv(rx, t)
            for b in self.contrib_bs:
                a_t = ch.target_tx(b, t)
                da_t = ch.target_tx_deriv(b, t)
                g = np.outer(da_r, a_t.conj()) + np.outer(a_r, da_t.conj())
                self.g_mats[(t, b)] = g
                alpha = ch.bistatic_alpha(b, t, rx)
                self.kappas[(t, b)] = 2.0 * self.spec.snapshots * abs(alpha) ** 2

        # Effective crosstalk channels through the matched combiner.
        self.xtalk_geff: Dict[int, np.ndarray] = {}
        for b in self.active_bs:
            if b == rx:
                continue
            h_mat = ch.cross[(b, rx)]
            self.xtalk_geff[b] = h_mat.conj().T @ self.u_rx
        # Clutter rows apply only to the receive BS's own transmission.
        self.clutter_rows_scale: List[Tuple[float, np.ndarray]] = []
        if rx in self.active_bs:
            for c in range(ch.clutter_angle.shape[1]):
                phi = float(ch.clutter_angle[rx, c])
                a = steering_vector(n_rx, phi)
                scale = abs(ch.clutter_gain[rx, c]) * abs(np.vdot(self.u_rx, a))
                self.clutter_rows_scale.append((scale, a))
        self.si_amp = (
            math.sqrt(
                float(ch.si_loop[rx]) * db_to_linear(-self.spec.si_cancellation_db)
            )
            if rx in self.active_bs
            else 0.0
        )

    # -- point packing -------------------------------------------------------
    def beams_of(self, b: int) -> List[str]:
        names = [f"w_{bb}_{k}" for bb, k in self.beam_pairs if bb == b]
        if b in self.sense_tx:
            names.append(f"v_{b}")
        return names

    def x_index(self, b: int, k: int) -> int:
        return self.comm_tx.index(b) * self.n_cu + k

    def pack(self, point: Point) -> np.ndarray:
        x = np.zeros(self.lay.n)
        for (b, k), w in point["w"].items():
            self.lay.set_complex(x, f"w_{b}_{k}", w)
        for b, v in point["v"].items():
            self.lay.set_complex(x, f"v_{b}", v)
        for i, b in enumerate(self.active_bs):
            x[self.lay.real_index("p", i)] = self._bs_power(point, b)
        if self.relaxed:
            self.lay.set_real(x, "x", point["x"])
        return x

    def unpack(self, xvec: np.ndarray) -> Point:
        w = {
            (b, k): self.lay.complex_value(xvec, f"w_{b}_{k}")
            for b, k in self.beam_pairs
        }
        v = {b: self.lay.complex_value(xvec, f"v_{b}") for b in self.sense_tx}
        xx = self.lay.real_value(xvec, "x").copy() if self.relaxed else None
        return {"w": w, "v": v, "x": xx}

    def _bs_power(self, point: Point, b: int) -> float:
        p = sum(
            float(np.vdot(w, w).real)
            for (bb, _), w in point["w"].items()
            if bb == b
        )
        if b in point["v"]:
            v = point["v"][b]
            p += float(np.vdot(v, v).real)
        return p

    def total_power(self, point: Point) -> float:
        return sum(self._bs_power(point, b) for b in self.active_bs)

    def penalty_value(self, point: Point) -> float:
        if not self.relaxed:
            return 0.0
        xx = np.asarray(point["x"], dtype=float)
        return float(np.sum(xx * (1.0 - xx)))

    def objective_value(self, point: Point, lam: float) -> float:
        return self.total_power(point) + lam * self.penalty_value(point)

    def surrogate_objective(self, point: Point, expansion: Point, lam: float) -> float:
        if not self.relaxed or lam == 0.0:
            return self.total_power(point)
        x0 = np.asarray(expansion["x"], dtype=float)
        xx = np.asarray(point["x"], dtype=float)
        lin = np.sum((1.0 - 2.0 * x0) * xx + x0**2)
        return self.total_power(point) + lam * float(lin)

    # -- interference rows at the echo receiver ------------------------------
    def _sensing_noise_rows(self) -> np.ndarray:
        rows = []
        for b in self.active_bs:
            if b == self.rx:
                # Own transmission: residual SI plus clutter returns.
                for name in self.beams_of(b):
                    if self.si_amp > 0:
                        rows.append(self.si_amp * self.lay.rows_identity(name))
                    for scale, a in self.clutter_rows_scale:
                        rows.append(scale * self.lay.rows_inner(name, a))
            else:
                geff = self.xtalk_geff[b]
                for name in self.beams_of(b):
                    rows.append(self.lay.rows_inner(name, geff))
        if rows:
            return np.vstack(rows)
        return np.zeros((0, self.lay.n))

    # -- problem assembly -----------------------------------------------------
    def build_problem(
        self, expansion: Point, lam: float, crlb_mode: str = "sca"
    ) -> ConicProblem:
        """Convex subproblem at the given expansion point.

        crlb_mode 'sca' linearizes the Fisher information (inner
        approximation); 'upper' replaces it with a linear necessary condition
        (outer relaxation, used for infeasibility certificates).
        """
        lay = self.lay
        n = lay.n
        c_obj = np.zeros(n)
        for i, _ in enumerate(self.active_bs):
            c_obj[lay.real_index("p", i)] = 1.0
        if self.relaxed and lam > 0:
            x0 = np.asarray(expansion["x"], dtype=float)
            for b in self.comm_tx:
                for k in range(self.n_cu):
                    idx = self.x_index(b, k)
                    c_obj[lay.real_index("x", idx)] += lam * (1.0 - 2.0 * x0[idx])

        g_rows: List[np.ndarray] = []
        h_vals: List[float] = []
        a_rows: List[np.ndarray] = []
        b_vals: List[float] = []
        socs = []

        # Per-BS power epigraph and budget.
        for i, b in enumerate(self.active_bs):
            rows = np.vstack([lay.rows_identity(nm) for nm in self.beams_of(b)])
            socs.append(
                soc_sumsq_le_affine(
                    rows, np.zeros(rows.shape[0]), lay.row_real("p", i), 0.0
                )
            )
            g_rows.append(lay.row_real("p", i))
            h_vals.append(self.p_max)
            g_rows.append(-lay.row_real("p", i))
            h_vals.append(0.0)

        # SINR constraints.
        if self.gamma is not None and self.n_cu > 0:
            for k in range(self.n_cu):
                if self.relaxed:
                    serving = [(b, k) for b in self.comm_tx]
                else:
                    serving = [(b, kk) for b, kk in self.beam_pairs if kk == k]
                des_re = np.zeros(n)
                des_im = np.zeros(n)
                for b, _ in serving:
                    h = self.ch.comm[(b, k)]
                    des_re += lay.row_inner_re(f"w_{b}_{k}", h)
                    des_im += lay.row_inner_im(f"w_{b}_{k}", h)
                a_rows.append(des_im)
                b_vals.append(0.0)
                stack = []
                for b, j in self.beam_pairs:
                    if j == k:
                        continue
                    q = self.ch.leak[(b, k)]
                    stack.append(lay.rows_inner(f"w_{b}_{j}", q))
                for b in self.sense_tx:
                    q = self.ch.leak[(b, k)]
                    stack.append(lay.rows_inner(f"v_{b}", q))
                rows = (
                    np.vstack(stack) if stack else np.zeros((0, n))
                )
                rows = np.vstack([rows, np.zeros((1, n))]) / self.sig_amp
                offs = np.zeros(rows.shape[0])
                offs[-1] = 1.0
                socs.append(
                    soc_norm_le_affine(
                        rows, offs, des_re / (math.sqrt(self.gamma) * self.sig_amp), 0.0
                    )
                )

        # Association (relaxed only).
        if self.relaxed:
            for k in range(self.n_cu):
                row = np.zeros(n)
                for b in self.comm_tx:
                    row[lay.real_index("x", self.x_index(b, k))] = 1.0
                a_rows.append(row)
                b_vals.append(1.0)
            for b in self.comm_tx:
                row = np.zeros(n)
                for k in range(self.n_cu):
                    row[lay.real_index("x", self.x_index(b, k))] = 1.0
                g_rows.append(row)
                h_vals.append(float(self.k_max))
            for b in self.comm_tx:
                for k in range(self.n_cu):
                    i = lay.real_index("x", self.x_index(b, k))
                    row = np.zeros(n)
                    row[i] = 1.0
                    g_rows.append(row)
                    h_vals.append(1.0)
                    g_rows.append(-row)
                    h_vals.append(0.0)
                    # Beam-off coupling: ||w_{b,k}||^2 <= P_max * x_{b,k}
                    rows = lay.rows_identity(f"w_{b}_{k}")
                    socs.append(
                        soc_sumsq_le_affine(
                            rows,
                            np.zeros(rows.shape[0]),
                            self.p_max * row,
                            0.0,
                        )
                    )

        # CRLB constraints.
        if self.sensing_on:
            c_max = self.targets.crlb_max
            noise_rows = self._sensing_noise_rows()
            for t in range(self.n_st):
                if crlb_mode == "upper":
                    # Necessary condition: c * sum_b eta_b p_b >= sigma^2.
                    row = np.zeros(n)
                    for i, b in enumerate(self.active_bs):
                        eta = self.kappas[(t, b)] * np.linalg.norm(
                            self.g_mats[(t, b)], 2
                        ) ** 2
                        row[lay.real_index("p", i)] = c_max * eta / self.sigma2
                    g_rows.append(-row)
                    h_vals.append(-1.0)
                    continue
                aff_row = np.zeros(n)
                aff_const = -1.0
                for b in self.contrib_bs:
                    g = self.g_mats[(t, b)]
                    kap = self.kappas[(t, b)]
                    for name in self.beams_of(b):
                        if name.startswith("w_"):
                            _, bb, kk = name.split("_")
                            x0 = expansion["w"].get((int(bb), int(kk)))
                        else:
                            x0 = expansion["v"].get(int(name.split("_")[1]))
                        if x0 is None:
                            continue
                        g0 = g @ x0
                        nrm = float(np.vdot(g0, g0).real)
                        if nrm < 1e-300:
                            continue
                        aff_row += (
                            2.0 * kap * c_max / self.sigma2
                        ) * self.lay.row_inner_re(name, g.conj().T @ g0)
                        aff_const -= kap * c_max * nrm / self.sigma2
                if noise_rows.shape[0]:
                    socs.append(
                        soc_sumsq_le_affine(
                            noise_rows / self.sig_amp,
                            np.zeros(noise_rows.shape[0]),
                            aff_row,
                            aff_const,
                        )
                    )
                else:
                    g_rows.append(-aff_row)
                    h_vals.append(aff_const)

        return ConicProblem(
            n=n,
            c=c_obj,
            a_eq=np.vstack(a_rows) if a_rows else None,
            b_eq=np.asarray(b_vals) if a_rows else None,
            g=np.vstack(g_rows) if g_rows else None,
            h=np.asarray(h_vals) if g_rows else None,
            socs=socs,
        )

    # -- initial points --------------------------------------------------------
    def initial_point(self) -> Point:
        w = {}
        for b, k in self.beam_pairs:
            h = self.ch.comm[(b, k)]
            scale = math.sqrt(self.p_max / (4.0 * max(1, self.n_cu)))
            w[(b, k)] = scale * h / max(np.linalg.norm(h), 1e-30)
        v = {}
        for b in self.sense_tx:
            a = self.ch.target_tx(b, 0) if self.n_st > 0 else None
            if a is None:
                v[b] = np.zeros(self.ch.bs_antennas[b], dtype=complex)
            else:
                v[b] = math.sqrt(self.p_max / 4.0) * a / np.linalg.norm(a)
        x = None
        if self.relaxed:
            x = np.full(len(self.comm_tx) * self.n_cu, 1.0 / max(1, len(self.comm_tx)))
        return {"w": w, "v": v, "x": x}

    def boost_sensing(self, point: Point) -> Point:
        """Scale sensing beams so the linearization point carries Fisher mass."""
        if not self.sensing_on or not self.sense_tx:
            return point
        v = dict(point["v"])
        for b in self.sense_tx:
            used = self._bs_power(point, b) - float(np.vdot(v[b], v[b]).real)
            head = max(self.p_max - used, 0.0)
            a = self.ch.target_tx(b, 0)
            if head > 1e-12:
                v[b] = math.sqrt(0.9 * head) * a / np.linalg.norm(a)
        out = dict(point)
        out["v"] = v
        return out


def _run_sca(
    ctx: _CmtContext, point0: Point, lam: float, tol: float, max_iter: int
) -> Tuple[Optional[Point], SolveReport]:
    """Feasibility-restoring first solve, then monotone SCA."""
    prob = ctx.build_problem(point0, lam)
    rep = solve_conic(prob)
    if rep.status == Status.INFEASIBLE:
        boosted = ctx.boost_sensing(point0)
        prob = ctx.build_problem(boosted, lam)
        rep = solve_conic(prob)
    if rep.status != Status.OPTIMAL:
        return None, rep
    p1 = ctx.unpack(rep.x)

    def builder(pt: Point):
        def surrogate(pt2: Point) -> float:
            return ctx.surrogate_objective(pt2, pt, lam)

        def step():
            sub = solve_conic(ctx.build_problem(pt, lam))
            if sub.status != Status.OPTIMAL:
                return pt, sub
            nxt = ctx.unpack(sub.x)
            # Guard against sub-solver tolerance producing a tiny uptick.
            if ctx.objective_value(nxt, lam) > ctx.objective_value(pt, lam):
                return pt, sub
            return nxt, sub

        return surrogate, step

    report = sca_minimize(
        objective=lambda pt: ctx.objective_value(pt, lam),
        surrogate_builder=builder,
        x0=p1,
        tol=tol,
        max_iter=max_iter,
    )
    point = report.extras.get("solution", p1)
    if report.status in (Status.OPTIMAL, Status.ITERATION_LIMIT):
        return point, report
    return None, report


def _solve_fixed(
    ctx: _CmtContext, init: Optional[Point], opts: CmtOptions
) -> Tuple[Optional[Point], SolveReport]:
    point0 = init if init is not None else ctx.initial_point()
    return _run_sca(ctx, point0, 0.0, opts.sca_tol, opts.sca_max_iter)


def _point_to_plan(ctx: _CmtContext, point: Point) -> BeamPlan:
    plan = BeamPlan()
    for (b, k), w in point["w"].items():
        if float(np.vdot(w, w).real) > 1e-18:
            plan.comm_beams[(b, k)] = np.asarray(w, dtype=complex)
    for b, v in point["v"].items():
        if float(np.vdot(v, v).real) > 1e-18:
            plan.sense_beams[b] = np.asarray(v, dtype=complex)
    if ctx.sensing_on:
        plan.combiners[ctx.rx] = ctx.u_rx.copy()
    return plan


def _effective_sensing_noise(
    rx: int, plan: BeamPlan, channels: ChannelSet, spec: ScenarioSpec
) -> float:
    """Noise floor at the echo receiver: thermal + crosstalk + clutter + SI."""
    sigma = spec.noise_power
    sigma += crosstalk_power(rx, plan, channels)
    sigma += clutter_power(rx, plan, channels)
    own = plan.tx_power(rx)
    if own > 0:
        sigma += residual_si_power(
            own, float(channels.si_loop[rx]), spec.si_cancellation_db
        )
    return sigma


def verify_cmt(
    assignment: Assignment,
    plan: BeamPlan,
    channels: ChannelSet,
    spec: ScenarioSpec,
    targets: QosTargets,
    rtol: float = VERIFY_RTOL,
) -> Dict[str, object]:
    """Independent re-check of every active constraint through the metrics."""

    ok = True
    detail: Dict[str, object] = {}
    if targets.sinr_min_db is not None and spec.n_cu > 0:
        gamma = db_to_linear(targets.sinr_min_db)
        sinrs = [comm_sinr(k, channels, plan, spec) for k in range(spec.n_cu)]
        detail["sinr"] = sinrs
        ok &= all(s >= gamma * (1.0 - rtol) for s in sinrs)
    rx = assignment.rx_bs
    if targets.crlb_max is not None and spec.n_st > 0 and rx is not None:
        sigma_eff = _effective_sensing_noise(rx, plan, channels, spec)
        crlbs = []
        for t in range(spec.n_st):
            j_tot = 0.0
            tx_bs = sorted(
                {b for (b, _) in plan.comm_beams}
                | set(plan.sense_beams)
                | set(plan.sense_cov)
            )
            for b in tx_bs:
                r_b = plan.tx_covariance(b, channels.bs_antennas[b])
                alpha = channels.bistatic_alpha(b, t, rx)
                m = fisher_matrix(
                    channels.target_tx(b, t),
                    channels.target_tx_deriv(b, t),
                    channels.target_rx(rx, t),
                    channels.target_rx_deriv(rx, t),
                )
                j_tot += (
                    2.0
                    * spec.snapshots
                    * abs(alpha) ** 2
                    / sigma_eff
                    * float(np.trace(m @ r_b).real)
                )
            crlbs.append(1.0 / j_tot if j_tot > 1e-300 else float("inf"))
        detail["crlb"] = crlbs
        detail["sigma_eff"] = sigma_eff
        ok &= all(c <= targets.crlb_max * (1.0 + rtol) for c in crlbs)
    powers = {}
    bs_set = {b for (b, _) in plan.comm_beams} | set(plan.sense_beams) | set(plan.sense_cov)
    for b in bs_set:
        powers[b] = plan.tx_power(b)
    detail["power"] = powers
    ok &= all(p <= targets.power_budget * (1.0 + rtol) for p in powers.values())
    detail["feasible"] = bool(ok)
    return detail


def cmt_design(
    scene: Scene,
    channels: ChannelSet,
    spec: ScenarioSpec,
    targets: QosTargets,
    k_max: int,
    options: Optional[CmtOptions] = None,
    warm: Optional[Tuple[Assignment, BeamPlan]] = None,
) -> Tuple[Optional[Assignment], Optional[BeamPlan], SolveReport]:
    """Power-minimal CMT design; see module docstring for the method."""
    opts = options or CmtOptions()
    n_bs, n_cu, n_st = spec.n_bs, spec.n_cu, spec.n_st
    sensing = n_st > 0 and targets.crlb_max is not None
    if sensing and n_bs < 2 and not opts.rx_transmits_sensing:
        raise ValueError("bistatic sensing needs at least 2 BSs")

    if sensing:
        rx_candidates = list(
            opts.rx_candidates if opts.rx_candidates is not None else range(n_bs)
        )
    else:
        rx_candidates = [None]

    best: Optional[Tuple[float, Assignment, BeamPlan, SolveReport]] = None
    all_certified_infeasible = True
    diagnostics = []
    traces: List[List[float]] = []

    candidates: List[Tuple[Optional[int], Optional[np.ndarray], Optional[BeamPlan]]] = []
    for rx in rx_candidates:
        candidates.append((rx, opts.fixed_assoc, None))
    if warm is not None:
        w_assign, w_plan = warm
        if w_assign.user_assoc is not None:
            candidates.append((w_assign.rx_bs, w_assign.user_assoc, w_plan))

    for rx, fixed_assoc, warm_plan in candidates:
        if opts.rx_transmits_sensing and sensing:
            comm_tx = [b for b in range(n_bs) if b != rx]
            sense_tx = [rx]
        else:
            comm_tx = [b for b in range(n_bs) if rx is None or b != rx]
            if opts.sense_tx is not None:
                sense_tx = [b for b in opts.sense_tx if rx is None or b != rx]
            else:
                sense_tx = list(comm_tx) if sensing else []
        if not sensing:
            sense_tx = []
        if n_cu > 0 and len(comm_tx) * k_max < n_cu:
            diagnostics.append({"rx": rx, "status": "infeasible", "reason": "cardinality"})
            continue

        if fixed_assoc is not None:
            if rx is not None and np.any(fixed_assoc[rx, :] > 0):
                diagnostics.append(
                    {"rx": rx, "status": "infeasible", "reason": "assoc uses rx BS"}
                )
                continue
            ctx = _CmtContext(
                scene, channels, spec, targets, k_max, rx, comm_tx, sense_tx,
                relaxed=False, assoc=fixed_assoc,
            )
            init = None
            if warm_plan is not None:
                base = ctx.initial_point()
                init = {
                    "w": {
                        pair: warm_plan.comm_beams.get(pair, base["w"][pair])
                        for pair in ctx.beam_pairs
                    },
                    "v": {
                        b: warm_plan.sense_beams.get(b, base["v"][b])
                        for b in ctx.sense_tx
                    },
                    "x": None,
                }
            point, rep = _solve_fixed(ctx, init, opts)
            if point is None:
                certified = rep.status == Status.INFEASIBLE and not ctx.sensing_on
                if not certified:
                    # Outer relaxation certificate attempt.
                    if ctx.sensing_on:
                        outer = solve_conic(
                            ctx.build_problem(ctx.initial_point(), 0.0, crlb_mode="upper")
                        )
                        certified = outer.status == Status.INFEASIBLE
                all_certified_infeasible &= certified
                diagnostics.append({"rx": rx, "status": "infeasible", "certified": certified})
                continue
            assoc = fixed_assoc
        else:
            ctx_rel = _CmtContext(
                scene, channels, spec, targets, k_max, rx, comm_tx, sense_tx,
                relaxed=True,
            )
            # Certified outer relaxation first.
            outer = solve_conic(
                ctx_rel.build_problem(ctx_rel.initial_point(), 0.0, crlb_mode="upper")
            )
            if outer.status == Status.INFEASIBLE:
                diagnostics.append({"rx": rx, "status": "infeasible", "certified": True})
                continue
            init = ctx_rel.initial_point()
            if outer.status == Status.OPTIMAL:
                rel_pt = ctx_rel.unpack(outer.x)
                rel_pt = ctx_rel.boost_sensing(rel_pt)
                if rel_pt["x"] is not None:
                    rel_pt["x"] = np.clip(rel_pt["x"], 0.0, 1.0)
                init = rel_pt

            state = {"point": init}

            def solve_relaxed(weight, x_prev, _ctx=ctx_rel, _state=state):
                pt, rep = _run_sca(_ctx, x_prev, weight, opts.sca_tol, opts.sca_max_iter)
                if pt is None:
                    return x_prev, rep
                _state["point"] = pt
                if rep.trace:
                    traces.append(rep.trace)
                return pt, rep

            pen = penalize_binary(
                solve_relaxed,
                binaries_of=lambda pt: np.asarray(pt["x"], dtype=float),
                x0=init,
            )
            if pen.status != Status.OPTIMAL:
                all_certified_infeasible = False
                diagnostics.append({"rx": rx, "status": "penalty_failed"})
                continue
            pt = pen.extras.get("solution", state["point"])
            xmat = np.asarray(pt["x"], dtype=float)
            assoc = np.zeros((n_bs, n_cu))
            for k in range(n_cu):
                scores = [xmat[ctx_rel.x_index(b, k)] for b in comm_tx]
                assoc[comm_tx[int(np.argmax(scores))], k] = 1.0
            ctx = _CmtContext(
                scene, channels, spec, targets, k_max, rx, comm_tx, sense_tx,
                relaxed=False, assoc=assoc,
            )
            init_fixed = {
                "w": {(b, k): pt["w"][(b, k)] for b, k in ctx.beam_pairs if (b, k) in pt["w"]},
                "v": dict(pt["v"]),
                "x": None,
            }
            point, rep = _solve_fixed(ctx, init_fixed, opts)
            if point is None:
                all_certified_infeasible = False
                diagnostics.append({"rx": rx, "status": "polish_failed"})
                continue

        if rep.trace:
            traces.append(rep.trace)
        plan = _point_to_plan(ctx, point)
        assignment = Assignment(
            rx_select=np.eye(n_bs)[rx] if (rx is not None and sensing) else np.zeros(n_bs),
            user_assoc=assoc if n_cu > 0 else None,
            k_max=k_max,
        )
        check = verify_cmt(assignment, plan, channels, spec, targets)
        if not check["feasible"]:
            all_certified_infeasible = False
            diagnostics.append({"rx": rx, "status": "verify_failed", "detail": check})
            continue
        power = plan.total_power()
        diagnostics.append({"rx": rx, "status": "feasible", "power": power})
        if best is None or power < best[0]:
            best = (power, assignment, plan, rep)

    # Warm design is always an admissible answer when it still verifies; this
    # makes the joint design dominate any fixed design it was seeded with.
    if warm is not None:
        w_assign, w_plan = warm
        w_check = verify_cmt(w_assign, w_plan, channels, spec, targets)
        if w_check["feasible"]:
            w_power = w_plan.total_power()
            diagnostics.append({"rx": w_assign.rx_bs, "status": "warm_feasible", "power": w_power})
            if best is None or w_power < best[0]:
                best = (
                    w_power,
                    w_assign,
                    w_plan,
                    SolveReport(status=Status.OPTIMAL, objective=w_power),
                )

    if best is not None:
        power, assignment, plan, rep = best
        report = SolveReport(
            status=Status.OPTIMAL,
            objective=power,
            iterations=rep.iterations,
            trace=rep.trace,
            extras={
                "diagnostics": diagnostics,
                "traces": traces,
                "verification": verify_cmt(assignment, plan, channels, spec, targets),
            },
        )
        return assignment, plan, report
    report = SolveReport(
        status=Status.INFEASIBLE,
        extras={
            "diagnostics": diagnostics,
            "traces": traces,
            "certified": all_certified_infeasible,
        },
    )
    return None, None, report
