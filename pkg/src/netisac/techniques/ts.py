"""Time-sharing design: split each frame into a communication phase and a
sensing phase and minimize the radiated energy.

Communication phase: per-CU rate targets over the time fraction tau_c become
SINR targets 2^(rate/tau_c) - 1; the minimum-power multi-RRH beamforming
problem at fixed tau_c is convex.  Sensing phase: pulse-radar operation (no
self-interference), each ST illuminated by its dedicated (nearest) RRH with a
flat-top covariance scaled to meet the echo-power floor; its duration is the
dwell floor tau_s.  Alternating optimization between (beams | tau_c) and
(tau_c | beams) gives a monotone energy trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..constants import linear_to_db
from ..interference import BeamPlan
from ..metrics import QosTargets, comm_sinr, echo_power
from ..scene import ChannelSet, ScenarioSpec, Scene
from ..solvers import SolveReport, Status, ao_minimize
from .assignment import Assignment
from .cmt import CmtOptions, cmt_design
from .hdbf import hdbf_design

DEFAULT_TAU_SENSE = 0.1
DEFAULT_MAINLOBE_HALFWIDTH = math.radians(5.0)
VERIFY_RTOL = 1e-6


@dataclass
class TsOptions:
    tau_sense: float = DEFAULT_TAU_SENSE  # sensing dwell fraction of the frame
    mainlobe_halfwidth: float = DEFAULT_MAINLOBE_HALFWIDTH
    grid_points: int = 181
    ao_tol: float = 1e-9
    ao_max_iter: int = 20
    fixed_time_split: Optional[Tuple[float, float]] = None  # (tau_c, tau_s)


def nearest_assoc(scene: Scene, spec: ScenarioSpec) -> np.ndarray:
    """Each CU served by its nearest RRH (binary RRH x CU matrix)."""
    assoc = np.zeros((spec.n_bs, spec.n_cu))
    for k in range(spec.n_cu):
        d = [scene.distance_from_bs(b, scene.cu_positions[k]) for b in range(spec.n_bs)]
        assoc[int(np.argmin(d)), k] = 1.0
    return assoc


def dedicated_rrh(scene: Scene, spec: ScenarioSpec) -> Dict[int, int]:
    """Nearest RRH per ST (the sensing dedication rule)."""
    out = {}
    for t in range(spec.n_st):
        d = [scene.distance_from_bs(b, scene.st_positions[t]) for b in range(spec.n_bs)]
        out[t] = int(np.argmin(d))
    return out


def _sense_plan(
    scene: Scene,
    channels: ChannelSet,
    spec: ScenarioSpec,
    targets: QosTargets,
    opts: TsOptions,
) -> Tuple[Optional[BeamPlan], float, Dict[int, float]]:
    """Flat-top covariances per dedicated RRH, scaled to the echo floor.

    Returns (plan or None if a floor is unreachable, total sensing power,
    per-ST achieved echo).
    """
    plan = BeamPlan()
    if spec.n_st == 0 or targets.echo_min is None:
        return plan, 0.0, {}
    grid = np.linspace(-math.pi / 2, math.pi / 2, opts.grid_points)
    echoes: Dict[int, float] = {}
    for t, b in dedicated_rrh(scene, spec).items():
        n = channels.bs_antennas[b]
        theta = float(channels.st_angle[b, t])
        lo = max(theta - opts.mainlobe_halfwidth, -math.pi / 2)
        hi = min(theta + opts.mainlobe_halfwidth, math.pi / 2)
        r_unit, _ = hdbf_design(n, (lo, hi), grid, power=1.0)
        a_t = channels.target_tx(b, t)
        alpha = channels.bistatic_alpha(b, t, b)  # monostatic round trip
        e_unit = echo_power(r_unit, alpha, a_t, a_t, a_t)
        if e_unit <= 0:
            return None, 0.0, {}
        scale = targets.echo_min / e_unit
        r = scale * r_unit
        if b in plan.sense_cov:
            plan.sense_cov[b] = plan.sense_cov[b] + r
        else:
            plan.sense_cov[b] = r
        plan.combiners[b] = a_t / np.linalg.norm(a_t)
        echoes[t] = targets.echo_min
    for b, r in plan.sense_cov.items():
        if float(np.trace(r).real) > targets.power_budget * (1.0 + 1e-9):
            return None, 0.0, {}
    total = sum(float(np.trace(r).real) for r in plan.sense_cov.values())
    return plan, total, echoes


def _comm_power_min(
    scene: Scene,
    channels: ChannelSet,
    spec: ScenarioSpec,
    gamma_db: float,
    p_max: float,
    assoc: np.ndarray,
) -> Tuple[Optional[BeamPlan], SolveReport]:
    """Convex minimum-power beamforming at a fixed SINR target."""
    t = QosTargets(sinr_min_db=gamma_db, power_budget=p_max)
    _, plan, rep = cmt_design(
        scene, channels, spec, t, k_max=spec.n_cu, options=CmtOptions(fixed_assoc=assoc)
    )
    return plan, rep


def _fronthaul_ok(assoc: np.ndarray, rate_min: float, cap: Optional[float]) -> bool:
    if cap is None:
        return True
    return bool(np.all(assoc.sum(axis=1) * rate_min <= cap + 1e-12))


def ts_verify(
    assignment: Assignment,
    comm_plan: BeamPlan,
    sense_plan: BeamPlan,
    channels: ChannelSet,
    spec: ScenarioSpec,
    targets: QosTargets,
    scene: Scene,
    rtol: float = VERIFY_RTOL,
) -> Dict[str, object]:
    """Re-check rates, echo floors, budgets, and the time split via metrics."""
    tau_c, tau_s = assignment.time_split
    detail: Dict[str, object] = {}
    ok = tau_c + tau_s <= 1.0 + 1e-9
    if targets.rate_min and spec.n_cu > 0:
        rates = [
            tau_c * math.log2(1.0 + comm_sinr(k, channels, comm_plan, spec))
            for k in range(spec.n_cu)
        ]
        detail["rates"] = rates
        ok &= all(r >= targets.rate_min * (1.0 - rtol) for r in rates)
    if targets.echo_min is not None and spec.n_st > 0:
        echoes = []
        for t, b in dedicated_rrh(scene, spec).items():
            a_t = channels.target_tx(b, t)
            alpha = channels.bistatic_alpha(b, t, b)
            r = sense_plan.sense_cov.get(b)
            e = 0.0 if r is None else echo_power(r, alpha, a_t, a_t, a_t)
            echoes.append(e)
        detail["echoes"] = echoes
        ok &= all(e >= targets.echo_min * (1.0 - rtol) for e in echoes)
    for plan in (comm_plan, sense_plan):
        bs = {b for (b, _) in plan.comm_beams} | set(plan.sense_beams) | set(plan.sense_cov)
        ok &= all(
            plan.tx_power(b) <= targets.power_budget * (1.0 + rtol) for b in bs
        )
    ok &= _fronthaul_ok(
        assignment.user_assoc if assignment.user_assoc is not None else np.zeros((0, 0)),
        targets.rate_min or 0.0,
        targets.fronthaul_cap,
    )
    detail["feasible"] = bool(ok)
    return detail


def ts_design(
    scene: Scene,
    channels: ChannelSet,
    spec: ScenarioSpec,
    targets: QosTargets,
    frame: float = 1.0,
    options: Optional[TsOptions] = None,
    warm: Optional[Tuple[Assignment, BeamPlan, BeamPlan]] = None,
) -> Tuple[Optional[Assignment], Dict[str, BeamPlan], float, SolveReport]:
    """Energy-minimal frame split and per-phase beam design.

    ``warm`` may carry a previous feasible design (already dimension-matched,
    e.g. zero-padded); it is re-verified and kept whenever it beats the fresh
    solution, which makes reported energies exactly monotone across nested
    problem families.
    """
    opts = options or TsOptions()
    if targets.rate_min is None:
        raise ValueError("time-sharing design needs a rate_min target")
    rate_min = targets.rate_min
    assoc = nearest_assoc(scene, spec)

    if not _fronthaul_ok(assoc, rate_min, targets.fronthaul_cap):
        return None, {}, math.inf, SolveReport(
            status=Status.INFEASIBLE, extras={"reason": "fronthaul capacity"}
        )

    sense_plan, p_sense, echoes = _sense_plan(scene, channels, spec, targets, opts)
    if sense_plan is None:
        return None, {}, math.inf, SolveReport(
            status=Status.INFEASIBLE, extras={"reason": "echo floor unreachable"}
        )
    tau_s = opts.tau_sense if (spec.n_st > 0 and targets.echo_min is not None) else 0.0
    if opts.fixed_time_split is not None:
        tau_c_max, tau_s = opts.fixed_time_split
    else:
        tau_c_max = 1.0 - tau_s

    def energy(state) -> float:
        plan = state["plan"]
        p_comm = plan.total_power() if plan is not None else 0.0
        return frame * (state["tau_c"] * p_comm + tau_s * p_sense)

    report_holder: Dict[str, SolveReport] = {}

    if rate_min <= 0 or spec.n_cu == 0:
        state = {"tau_c": 0.0, "plan": BeamPlan()}
        ao_rep = SolveReport(status=Status.OPTIMAL, objective=energy(state), trace=[energy(state)])
    else:
        gamma0 = 2.0 ** (rate_min / tau_c_max) - 1.0
        plan0, rep0 = _comm_power_min(
            scene, channels, spec, linear_to_db(gamma0), targets.power_budget, assoc
        )
        if plan0 is None:
            return None, {}, math.inf, SolveReport(
                status=rep0.status, extras={"reason": "rate unreachable", "sub": rep0.extras}
            )
        state0 = {"tau_c": tau_c_max, "plan": plan0}

        def beams_block(state):
            tau_c = state["tau_c"]
            gamma = 2.0 ** (rate_min / tau_c) - 1.0
            plan, rep = _comm_power_min(
                scene, channels, spec, linear_to_db(gamma), targets.power_budget, assoc
            )
            if plan is None:
                return state, rep
            report_holder["last"] = rep
            # Keep the old plan if the solve only matched it numerically.
            if plan.total_power() > state["plan"].total_power():
                return state, rep
            return {"tau_c": tau_c, "plan": plan}, rep

        def tau_block(state):
            if opts.fixed_time_split is not None:
                return state
            plan = state["plan"]
            sinrs = [comm_sinr(k, channels, plan, spec) for k in range(spec.n_cu)]
            if any(s <= 0 for s in sinrs):
                return state
            tau_req = max(rate_min / math.log2(1.0 + s) for s in sinrs)
            tau_new = min(max(tau_req, 1e-9), state["tau_c"])
            return {"tau_c": tau_new, "plan": plan}

        ao_rep = ao_minimize(
            energy, [beams_block, tau_block], state0, tol=opts.ao_tol, max_iter=opts.ao_max_iter
        )
        if ao_rep.status not in (Status.OPTIMAL, Status.ITERATION_LIMIT):
            return None, {}, math.inf, ao_rep
        state = ao_rep.extras.get("solution", state0)

    tau_c, comm_plan = state["tau_c"], state["plan"]
    assignment = Assignment(
        user_assoc=assoc if spec.n_cu > 0 else None,
        time_split=(tau_c, tau_s),
        k_max=spec.n_cu,
    )
    e_fresh = energy(state)
    check = ts_verify(assignment, comm_plan, sense_plan, channels, spec, targets, scene)
    if not check["feasible"]:
        return None, {}, math.inf, SolveReport(
            status=Status.NUMERICAL_FAILURE, extras={"verification": check}
        )

    best = (e_fresh, assignment, comm_plan, sense_plan, check, ao_rep.trace)
    if warm is not None:
        w_assign, w_comm, w_sense = warm
        w_check = ts_verify(w_assign, w_comm, w_sense, channels, spec, targets, scene)
        if w_check["feasible"]:
            w_tau_c, w_tau_s = w_assign.time_split
            w_sense_p = sum(float(np.trace(r).real) for r in w_sense.sense_cov.values())
            e_warm = frame * (w_tau_c * w_comm.total_power() + w_tau_s * w_sense_p)
            if e_warm < best[0]:
                best = (e_warm, w_assign, w_comm, w_sense, w_check, ao_rep.trace)

    e_best, assignment, comm_plan, sense_plan, check, trace = best
    report = SolveReport(
        status=Status.OPTIMAL,
        objective=e_best,
        trace=trace,
        extras={"verification": check, "sense_power": p_sense, "echoes": echoes},
    )
    return assignment, {"comm": comm_plan, "sense": sense_plan}, e_best, report
