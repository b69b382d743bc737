"""Spectrum allocation: orthogonal subcarrier assignment across tasks.

Tasks (communication links or sensing jobs) demand whole subcarriers; a
subcarrier carries at most one task, and tasks that interfere with each other
(mutual interference or crosstalk) must never share a band.  Formulated as a
binary integer program and solved exactly by branch and bound or
approximately by LP-relaxation rounding.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..solvers import BinaryProgram, SolveReport, Status, branch_and_bound, lpr_round
from .assignment import Assignment


def conflict_graph_complete(n_tasks: int) -> List[Tuple[int, int]]:
    """Every pair conflicts (all tasks interfere on shared spectrum)."""
    return [(i, j) for i in range(n_tasks) for j in range(i + 1, n_tasks)]


def band_interference(
    assign: np.ndarray, coupling: np.ndarray
) -> np.ndarray:
    """Per-subcarrier interference: sum of couplings of co-channel task pairs.

    ``coupling[i, j]`` is the MI/crosstalk power task i induces on task j when
    they share a band; orthogonal assignments yield exactly zero everywhere.
    """
    assign = np.asarray(assign)
    n_tasks, n_sub = assign.shape
    coupling = np.asarray(coupling, dtype=float)
    out = np.zeros(n_sub)
    for n in range(n_sub):
        active = np.flatnonzero(assign[:, n])
        for i in active:
            for j in active:
                if i != j:
                    out[n] += coupling[i, j]
    return out


def sa_design(
    demands: Sequence[int],
    n_subcarriers: int,
    conflicts: Optional[Iterable[Tuple[int, int]]] = None,
    mode: str = "serve_all",
    method: str = "bnb",
) -> Tuple[Optional[Assignment], SolveReport]:
    """Assign subcarriers to tasks.

    ``mode='serve_all'`` demands every task receive exactly its subcarrier
    count (feasibility problem); ``mode='max_served'`` serves as many
    subcarriers of demand as possible.  ``method`` picks the exact
    branch-and-bound solver or the LP-rounding heuristic.
    """
    demands = [int(d) for d in demands]
    if any(d < 0 for d in demands):
        raise ValueError("demands must be >= 0")
    if n_subcarriers < 0:
        raise ValueError("n_subcarriers must be >= 0")
    if mode not in ("serve_all", "max_served"):
        raise ValueError(f"unknown mode {mode!r}")
    if method not in ("bnb", "lpr"):
        raise ValueError(f"unknown method {method!r}")
    n_tasks = len(demands)
    conflicts = list(conflicts) if conflicts is not None else conflict_graph_complete(n_tasks)
    for i, j in conflicts:
        if not (0 <= i < n_tasks and 0 <= j < n_tasks) or i == j:
            raise ValueError(f"bad conflict pair ({i}, {j})")

    if mode == "serve_all" and sum(demands) > n_subcarriers:
        return None, SolveReport(
            status=Status.INFEASIBLE,
            extras={"reason": "total demand exceeds subcarriers"},
        )

    nvar = n_tasks * n_subcarriers
    if nvar == 0:
        out = Assignment(subcarrier_assign=np.zeros((n_tasks, n_subcarriers)))
        return out, SolveReport(status=Status.OPTIMAL, objective=0.0, extras={"served": 0.0})

    def idx(t: int, n: int) -> int:
        return t * n_subcarriers + n

    a_ub_rows: List[np.ndarray] = []
    b_ub: List[float] = []
    # One task per subcarrier.
    for n in range(n_subcarriers):
        row = np.zeros(nvar)
        for t in range(n_tasks):
            row[idx(t, n)] = 1.0
        a_ub_rows.append(row)
        b_ub.append(1.0)
    # Conflicting tasks never share a band (redundant with exclusivity but
    # kept explicit so partial-exclusivity variants stay correct).
    for i, j in conflicts:
        for n in range(n_subcarriers):
            row = np.zeros(nvar)
            row[idx(i, n)] = 1.0
            row[idx(j, n)] = 1.0
            a_ub_rows.append(row)
            b_ub.append(1.0)

    a_eq = b_eq = None
    if mode == "serve_all":
        rows = []
        vals = []
        for t in range(n_tasks):
            row = np.zeros(nvar)
            row[t * n_subcarriers : (t + 1) * n_subcarriers] = 1.0
            rows.append(row)
            vals.append(float(demands[t]))
        a_eq = np.vstack(rows) if rows else None
        b_eq = np.asarray(vals) if rows else None
        c = np.zeros(nvar)
    else:
        for t in range(n_tasks):
            row = np.zeros(nvar)
            row[t * n_subcarriers : (t + 1) * n_subcarriers] = 1.0
            a_ub_rows.append(row)
            b_ub.append(float(demands[t]))
        c = -np.ones(nvar)  # maximize served subcarriers

    bip = BinaryProgram(
        c=c,
        a_ub=np.vstack(a_ub_rows) if a_ub_rows else None,
        b_ub=np.asarray(b_ub) if a_ub_rows else None,
        a_eq=a_eq,
        b_eq=b_eq,
    )
    rep = branch_and_bound(bip) if method == "bnb" else lpr_round(bip)
    if rep.status != Status.OPTIMAL or rep.x is None:
        return None, rep
    assign = np.rint(rep.x.reshape(n_tasks, n_subcarriers)).astype(float)
    rep.extras["served"] = float(assign.sum())
    out = Assignment(subcarrier_assign=assign)
    out.validate()
    return out, rep
