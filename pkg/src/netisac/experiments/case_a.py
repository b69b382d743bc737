"""Case A: coordinated cellular network, infeasibility-rate sweep.

One design problem per (setup, SINR target): minimize total transmit power
under per-CU SINR, per-ST CRLB, and per-BS budget constraints.  Schemes:

* ``proposed``   — joint receive-BS selection, association, and beamforming.
* ``baseline1``  — fixed bistatic pair: BS 0 carries the sensing beam, BS 1
                   receives the echo; association still optimized.
* ``baseline2``  — random receive BS and random CU association.
* ``baseline3``  — monostatic: the BS nearest the target senses it (transmit
                   and receive on the same array, residual self-interference
                   active) while the other BSs communicate.

Feasible-set nesting over the SINR axis: any design feasible at a target is
re-verified and reused at every lower target, so each scheme's infeasibility
curve is non-decreasing by construction.  The proposed scheme is additionally
warm-started with every baseline design, making per-seed dominance over
baseline1/baseline2 exact.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..interference import BeamPlan
from ..metrics import QosTargets
from ..scene import ScenarioSpec, Scene, generate_channels, generate_scene
from ..solvers import SolveReport, Status
from ..techniques import Assignment, CmtOptions, cmt_design, verify_cmt
from .results import SweepResult, binomial_halfwidth, derive_seeds

SCHEMES_A = ("proposed", "baseline1", "baseline2", "baseline3")
DEFAULT_POWER_BUDGET_A = 2.5e-4  # watts per BS; calibrated so the 0-14 dB
# target range spans the feasible-to-infeasible transition
DEFAULT_CRLB_MAX = 1.0
DEFAULT_K_MAX = 3


def _random_assoc(
    n_bs: int, n_cu: int, comm_tx: Sequence[int], k_max: int, rng: np.random.Generator
) -> np.ndarray:
    """Random CU assignment over the transmitting BSs, respecting the cap."""
    for _ in range(1000):
        assoc = np.zeros((n_bs, n_cu))
        for k in range(n_cu):
            assoc[comm_tx[int(rng.integers(len(comm_tx)))], k] = 1.0
        if np.all(assoc.sum(axis=1) <= k_max):
            return assoc
    # Fall back to round-robin (always cap-feasible when len*k_max >= n_cu).
    assoc = np.zeros((n_bs, n_cu))
    for k in range(n_cu):
        assoc[comm_tx[k % len(comm_tx)], k] = 1.0
    return assoc


def _scheme_options(
    scheme: str,
    scene: Scene,
    spec: ScenarioSpec,
    seed: int,
    k_max: int,
) -> CmtOptions:
    if scheme == "proposed":
        return CmtOptions()
    if scheme == "baseline1":
        if spec.n_bs < 2:
            raise ValueError("baseline1 needs at least 2 BSs")
        return CmtOptions(rx_candidates=[1], sense_tx=[0])
    if scheme == "baseline2":
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xBA5E, 2)))
        rx = int(rng.integers(spec.n_bs)) if spec.n_st > 0 else None
        comm_tx = [b for b in range(spec.n_bs) if b != rx]
        assoc = _random_assoc(spec.n_bs, spec.n_cu, comm_tx, k_max, rng)
        return CmtOptions(
            rx_candidates=[rx] if rx is not None else None, fixed_assoc=assoc
        )
    if scheme == "baseline3":
        if spec.n_st == 0:
            return CmtOptions()
        d = [
            scene.distance_from_bs(b, scene.st_positions[0]) for b in range(spec.n_bs)
        ]
        rx = int(np.argmin(d))
        return CmtOptions(rx_candidates=[rx], rx_transmits_sensing=True)
    raise ValueError(f"unknown scheme {scheme!r}")


def run_case_a(
    spec: ScenarioSpec,
    seed: int,
    scheme: str,
    gamma_db: float,
    crlb_max: Optional[float] = DEFAULT_CRLB_MAX,
    power_budget: float = DEFAULT_POWER_BUDGET_A,
    k_max: int = DEFAULT_K_MAX,
    warm: Optional[Tuple[Assignment, BeamPlan]] = None,
) -> Tuple[SolveReport, Optional[Assignment], Optional[BeamPlan]]:
    """Solve one case-A design problem for one scheme and setup."""
    scene = generate_scene(spec, seed)
    channels = generate_channels(scene, spec, seed)
    targets = QosTargets(
        sinr_min_db=gamma_db, crlb_max=crlb_max, power_budget=power_budget
    )
    opts = _scheme_options(scheme, scene, spec, seed, k_max)
    if scheme == "proposed" and warm is None:
        # Seed the joint solve with a baseline design (its feasible set is a
        # subset), so a standalone call matches the sweep's warm-started path.
        for other in ("baseline1", "baseline2"):
            o_opts = _scheme_options(other, scene, spec, seed, k_max)
            o_assign, o_plan, _ = cmt_design(
                scene, channels, spec, targets, k_max, options=o_opts
            )
            if o_assign is not None:
                warm = (o_assign, o_plan)
                break
    assignment, plan, report = cmt_design(
        scene, channels, spec, targets, k_max, options=opts, warm=warm
    )
    return report, assignment, plan


def sweep_infeasibility(
    spec: ScenarioSpec,
    gamma_grid_db: Sequence[float],
    n_setups: int,
    schemes: Sequence[str] = SCHEMES_A,
    crlb_max: Optional[float] = DEFAULT_CRLB_MAX,
    power_budget: float = DEFAULT_POWER_BUDGET_A,
    k_max: int = DEFAULT_K_MAX,
    master_seed: int = 0,
) -> SweepResult:
    """Infeasibility rate per (scheme, SINR target) over shared random setups."""
    gammas = [float(g) for g in gamma_grid_db]
    if sorted(gammas) != gammas or len(set(gammas)) != len(gammas):
        raise ValueError("gamma grid must be strictly increasing")
    seeds = derive_seeds(master_seed, n_setups)

    infeas = {s: np.zeros(len(gammas)) for s in schemes}
    fails = {s: np.zeros(len(gammas)) for s in schemes}

    for seed in seeds:
        scene = generate_scene(spec, seed)
        channels = generate_channels(scene, spec, seed)
        # designs_at[scheme][gamma_index] -> (Assignment, BeamPlan) if feasible
        designs_at: Dict[str, Dict[int, Tuple[Assignment, BeamPlan]]] = {}

        def solve_scheme(scheme: str) -> None:
            opts = _scheme_options(scheme, scene, spec, seed, k_max)
            found: Optional[Tuple[Assignment, BeamPlan]] = None
            designs_at[scheme] = {}
            for gi in range(len(gammas) - 1, -1, -1):
                targets = QosTargets(
                    sinr_min_db=gammas[gi],
                    crlb_max=crlb_max,
                    power_budget=power_budget,
                )
                if found is not None:
                    # Feasible-set nesting: re-verify the higher-target design.
                    check = verify_cmt(found[0], found[1], channels, spec, targets)
                    if not check["feasible"]:  # pragma: no cover - nesting guarantee
                        raise AssertionError(
                            "design feasible at a higher SINR target failed at a lower one"
                        )
                    designs_at[scheme][gi] = found
                    continue
                warm = None
                if scheme == "proposed":
                    for other in ("baseline1", "baseline2"):
                        cand = designs_at.get(other, {}).get(gi)
                        if cand is not None:
                            warm = cand
                            break
                assignment, plan, report = cmt_design(
                    scene, channels, spec, targets, k_max, options=opts, warm=warm
                )
                if assignment is not None:
                    found = (assignment, plan)
                    designs_at[scheme][gi] = found
                else:
                    # No design meets the targets: an infeasibility verdict.
                    # Numerical breakdowns are tallied separately so honest
                    # interference-driven infeasibility stays distinguishable.
                    infeas[scheme][gi] += 1
                    if report.status == Status.NUMERICAL_FAILURE:
                        fails[scheme][gi] += 1

        for scheme in schemes:
            if scheme == "proposed":
                continue
            solve_scheme(scheme)
        if "proposed" in schemes:
            solve_scheme("proposed")

    result = SweepResult(axis=gammas, n_setups=n_setups, seeds=list(seeds))
    for s in schemes:
        rates = (infeas[s] / n_setups).tolist()
        result.curves[s] = rates
        result.failures[s] = (fails[s] / n_setups).tolist()
        result.ci_halfwidth[s] = [binomial_halfwidth(p, n_setups) for p in rates]
    result.validate()

    for s in schemes:
        rates = result.curves[s]
        if any(rates[i + 1] < rates[i] - 1e-12 for i in range(len(rates) - 1)):
            raise AssertionError(f"infeasibility curve for {s} is not non-decreasing")
    return result
