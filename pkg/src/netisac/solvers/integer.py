"""Binary integer programming kernels: branch-and-bound, LP-relaxation
rounding, the penalty method, and the big-M product linearization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .report import SolveReport, Status

BINARY_TOL = 1e-4
DEFAULT_PENALTY_SCHEDULE = tuple(1.0 * 5.0**k for k in range(12))  # capped at ~2.4e8


@dataclass
class BinaryProgram:
    """min c^T x s.t. A_ub x <= b_ub, A_eq x = b_eq, x[binary] in {0,1}.

    Non-binary variables take the bounds in ``bounds`` (default [0, 1]).
    """

    c: np.ndarray
    a_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    binary: Optional[Sequence[int]] = None  # default: all variables
    bounds: Optional[List[Tuple[float, float]]] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.n = len(self.c)
        if self.binary is None:
            self.binary = list(range(self.n))
        if self.bounds is None:
            self.bounds = [(0.0, 1.0)] * self.n

    def is_feasible(self, x: np.ndarray, tol: float = 1e-7) -> bool:
        if self.a_ub is not None and np.any(self.a_ub @ x - self.b_ub > tol):
            return False
        if self.a_eq is not None and np.any(np.abs(self.a_eq @ x - self.b_eq) > tol):
            return False
        for i, (lo, hi) in enumerate(self.bounds):
            if x[i] < lo - tol or x[i] > hi + tol:
                return False
        return True

    def violation(self, x: np.ndarray) -> float:
        v = 0.0
        if self.a_ub is not None:
            v += float(np.sum(np.clip(self.a_ub @ x - self.b_ub, 0.0, None)))
        if self.a_eq is not None:
            v += float(np.sum(np.abs(self.a_eq @ x - self.b_eq)))
        return v

    def _lp(self, fixed: dict) -> Tuple[str, Optional[np.ndarray], float]:
        bounds = list(self.bounds)
        for i, val in fixed.items():
            bounds[i] = (val, val)
        res = linprog(
            self.c,
            A_ub=self.a_ub,
            b_ub=self.b_ub,
            A_eq=self.a_eq,
            b_eq=self.b_eq,
            bounds=bounds,
            method="highs",
        )
        if res.status == 2:
            return "infeasible", None, math.inf
        if res.status == 3:
            return "unbounded", None, -math.inf
        if not res.success:
            return "failed", None, math.inf
        return "ok", res.x, float(res.fun)


def branch_and_bound(bip: BinaryProgram, max_nodes: int = 200_000) -> SolveReport:
    """Exact BnB over the binary variables via LP relaxations.

    Branch variable: most fractional, ties broken by lowest index; the
    0-branch is explored first (determinism).
    """
    best_x: Optional[np.ndarray] = None
    best_obj = math.inf
    nodes = 0
    infeasible_root = False

    stack: List[dict] = [{}]
    while stack:
        fixed = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            return SolveReport(
                status=Status.ITERATION_LIMIT,
                objective=best_obj,
                x=best_x,
                iterations=nodes,
            )
        status, x, obj = bip._lp(fixed)
        if status == "infeasible":
            if nodes == 1:
                infeasible_root = True
            continue
        if status == "unbounded":
            return SolveReport(status=Status.UNBOUNDED, iterations=nodes)
        if status == "failed":
            return SolveReport(status=Status.NUMERICAL_FAILURE, iterations=nodes)
        if obj >= best_obj - 1e-9:
            continue
        frac = [(abs(x[i] - round(x[i])), i) for i in bip.binary if i not in fixed]
        frac = [(f, i) for f, i in frac if f > 1e-7]
        if not frac:
            x_int = x.copy()
            for i in bip.binary:
                x_int[i] = round(x_int[i])
            if bip.is_feasible(x_int) and float(bip.c @ x_int) < best_obj:
                best_obj = float(bip.c @ x_int)
                best_x = x_int
            continue
        # most fractional; ties by lowest index
        frac.sort(key=lambda t: (-t[0], t[1]))
        _, j = frac[0]
        hi = dict(fixed)
        hi[j] = 1.0
        lo = dict(fixed)
        lo[j] = 0.0
        stack.append(hi)
        stack.append(lo)  # popped first -> 0-branch explored first

    if best_x is None:
        return SolveReport(
            status=Status.INFEASIBLE,
            iterations=nodes,
            extras={"certificate": "all branches LP-infeasible", "root_infeasible": infeasible_root},
        )
    return SolveReport(
        status=Status.OPTIMAL,
        objective=best_obj,
        x=best_x,
        iterations=nodes,
        extras={"nodes": nodes},
    )


def lpr_round(bip: BinaryProgram, max_repair: int = 200) -> SolveReport:
    """LP relaxation plus rounding and greedy single-flip repair.

    Returns a feasible binary point (objective >= the exact optimum for
    minimization) or a declared failure; the LP lower bound is reported.
    """
    status, x_rel, lp_bound = bip._lp({})
    if status == "infeasible":
        return SolveReport(status=Status.INFEASIBLE)
    if status != "ok":
        return SolveReport(status=Status.NUMERICAL_FAILURE)
    x = x_rel.copy()
    for i in bip.binary:
        x[i] = 1.0 if x[i] >= 0.5 else 0.0

    for _ in range(max_repair):
        if bip.is_feasible(x):
            break
        base = bip.violation(x)
        best = None
        for i in bip.binary:
            cand = x.copy()
            cand[i] = 1.0 - cand[i]
            v = bip.violation(cand)
            if v < base - 1e-12 and (best is None or v < best[0]):
                best = (v, i)
        if best is None:
            return SolveReport(
                status=Status.NUMERICAL_FAILURE,
                extras={"lp_bound": lp_bound, "reason": "repair stalled"},
            )
        x[best[1]] = 1.0 - x[best[1]]
    if not bip.is_feasible(x):
        return SolveReport(
            status=Status.NUMERICAL_FAILURE,
            extras={"lp_bound": lp_bound, "reason": "repair exhausted"},
        )
    obj = float(bip.c @ x)
    return SolveReport(
        status=Status.OPTIMAL,
        objective=obj,
        x=x,
        extras={"lp_bound": lp_bound, "gap": obj - lp_bound},
    )


def penalize_binary(
    solve_relaxed: Callable[[float, object], Tuple[object, SolveReport]],
    binaries_of: Callable[[object], np.ndarray],
    x0: object,
    weight_schedule: Sequence[float] = DEFAULT_PENALTY_SCHEDULE,
    tol_bin: float = BINARY_TOL,
) -> SolveReport:
    """Drive relaxed binaries to {0, 1} with an escalating penalty weight.

    ``solve_relaxed(weight, x_prev)`` re-solves the relaxed problem with the
    given penalty weight starting from ``x_prev``.  Succeeds when every
    relaxed binary b satisfies min(b, 1-b) <= tol_bin; a silent non-binary
    return is forbidden, so schedule exhaustion is a failure.
    """

    def binarized(x) -> bool:
        b = np.asarray(binaries_of(x), dtype=float)
        return bool(np.all(np.minimum(b, 1.0 - b) <= tol_bin))

    if binarized(x0):
        rep = SolveReport(status=Status.OPTIMAL, extras={"weights_used": 0})
        rep.extras["solution"] = x0
        return rep

    x = x0
    for count, weight in enumerate(weight_schedule, start=1):
        x, sub = solve_relaxed(weight, x)
        if sub.status == Status.INFEASIBLE:
            return SolveReport(status=Status.INFEASIBLE, iterations=count)
        if sub.status not in (Status.OPTIMAL, Status.ITERATION_LIMIT):
            return SolveReport(status=Status.NUMERICAL_FAILURE, iterations=count)
        if binarized(x):
            rep = SolveReport(
                status=Status.OPTIMAL,
                objective=sub.objective,
                iterations=count,
                extras={"weights_used": count, "solution": x},
            )
            return rep
    b = np.asarray(binaries_of(x), dtype=float)
    return SolveReport(
        status=Status.NUMERICAL_FAILURE,
        iterations=len(list(weight_schedule)),
        extras={
            "solution": x,
            "max_binary_gap": float(np.max(np.minimum(b, 1.0 - b), initial=0.0)),
            "reason": "penalty schedule exhausted without binarization",
        },
    )


def big_m_product(
    n: int, iy: int, iz: int, iu: int, z_max: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Rows (G, h) with G x <= h enforcing u = y*z for binary y, z in [0, Z].

    Constraints: u <= Z*y, u <= z, u >= z - Z*(1-y), u >= 0.
    """
    if z_max <= 0:
        raise ValueError("z_max must be > 0")
    g = np.zeros((4, n))
    h = np.zeros(4)
    g[0, iu], g[0, iy], h[0] = 1.0, -z_max, 0.0  # u - Z y <= 0
    g[1, iu], g[1, iz], h[1] = 1.0, -1.0, 0.0  # u - z <= 0
    g[2, iu], g[2, iz], g[2, iy], h[2] = -1.0, 1.0, z_max, z_max  # z - u + Z y <= Z
    g[3, iu], h[3] = -1.0, 0.0  # -u <= 0
    return g, h
