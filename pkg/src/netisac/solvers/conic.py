"""Second-order-cone programming in a small standard form.

The per-iteration convex subproblems of every technique are expressed as a
:class:`ConicProblem` (linear objective, affine equalities/inequalities,
second-order cones) and handed to Clarabel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse

import clarabel

from .report import FEASIBILITY_TOL, SolveReport, Status


@dataclass
class SecondOrderCone:
    """Constraint ||A x + b|| <= c^T x + d."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float = 0.0

    def violation(self, x: np.ndarray) -> float:
        lhs = float(np.linalg.norm(self.A @ x + self.b))
        rhs = float(self.c @ x + self.d)
        return max(0.0, lhs - rhs)


@dataclass
class ConicProblem:
    """min c^T x  s.t.  A_eq x = b_eq,  G x <= h,  SOC constraints."""

    n: int
    c: np.ndarray
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    h: Optional[np.ndarray] = None
    socs: List[SecondOrderCone] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.shape != (self.n,):
            raise ValueError("objective dimension mismatch")
        if (self.a_eq is None) != (self.b_eq is None):
            raise ValueError("equality matrix and rhs must come together")
        if self.a_eq is not None and np.asarray(self.a_eq).shape[1] != self.n:
            raise ValueError("equality matrix dimension mismatch")
        if (self.g is None) != (self.h is None):
            raise ValueError("inequality matrix and rhs must come together")
        if self.g is not None and np.asarray(self.g).shape[1] != self.n:
            raise ValueError("inequality matrix dimension mismatch")
        for soc in self.socs:
            if soc.A.shape[1] != self.n or soc.c.shape != (self.n,):
                raise ValueError("SOC dimension mismatch")

    def max_violation(self, x: np.ndarray) -> float:
        v = 0.0
        if self.a_eq is not None:
            v = max(v, float(np.max(np.abs(self.a_eq @ x - self.b_eq), initial=0.0)))
        if self.g is not None:
            v = max(v, float(np.max(self.g @ x - self.h, initial=0.0)))
        for soc in self.socs:
            v = max(v, soc.violation(x))
        return v


def solve_conic(problem: ConicProblem, feas_tol: float = FEASIBILITY_TOL) -> SolveReport:
    """Solve a :class:`ConicProblem` and report per the solver contract."""
    rows = []
    rhs = []
    cones = []
    if problem.a_eq is not None and len(problem.b_eq):
        rows.append(np.asarray(problem.a_eq, dtype=float))
        rhs.append(np.asarray(problem.b_eq, dtype=float))
        cones.append(clarabel.ZeroConeT(len(problem.b_eq)))
    if problem.g is not None and len(problem.h):
        rows.append(np.asarray(problem.g, dtype=float))
        rhs.append(np.asarray(problem.h, dtype=float))
        cones.append(clarabel.NonnegativeConeT(len(problem.h)))
    for soc in problem.socs:
        m = soc.A.shape[0]
        rows.append(-soc.c.reshape(1, -1))
        rhs.append(np.array([soc.d]))
        rows.append(-np.asarray(soc.A, dtype=float))
        rhs.append(np.asarray(soc.b, dtype=float))
        cones.append(clarabel.SecondOrderConeT(m + 1))

    if rows:
        a_mat = sparse.csc_matrix(np.vstack(rows))
        b_vec = np.concatenate(rhs)
    else:
        a_mat = sparse.csc_matrix((0, problem.n))
        b_vec = np.zeros(0)

    settings = clarabel.DefaultSettings()
    settings.verbose = False
    solver = clarabel.DefaultSolver(
        sparse.csc_matrix((problem.n, problem.n)),
        problem.c,
        a_mat,
        b_vec,
        cones,
        settings,
    )
    sol = solver.solve()
    status_name = str(sol.status)

    if status_name in ("Solved", "AlmostSolved"):
        x = np.asarray(sol.x)
        viol = problem.max_violation(x)
        if viol <= feas_tol:
            return SolveReport(
                status=Status.OPTIMAL,
                objective=float(problem.c @ x),
                x=x,
                iterations=int(sol.iterations),
                max_violation=viol,
                feas_tol=feas_tol,
            )
        return SolveReport(
            status=Status.NUMERICAL_FAILURE,
            objective=float(problem.c @ x),
            x=x,
            iterations=int(sol.iterations),
            max_violation=viol,
            feas_tol=feas_tol,
        )
    if status_name in ("PrimalInfeasible", "AlmostPrimalInfeasible"):
        return SolveReport(
            status=Status.INFEASIBLE,
            iterations=int(sol.iterations),
            extras={"certificate": np.asarray(sol.z)},
            feas_tol=feas_tol,
        )
    if status_name in ("DualInfeasible", "AlmostDualInfeasible"):
        return SolveReport(status=Status.UNBOUNDED, iterations=int(sol.iterations))
    if status_name in ("MaxIterations", "MaxTime"):
        x = np.asarray(sol.x) if sol.x is not None else None
        return SolveReport(
            status=Status.ITERATION_LIMIT,
            objective=float(problem.c @ x) if x is not None else float("nan"),
            x=x,
            iterations=int(sol.iterations),
            max_violation=problem.max_violation(x) if x is not None else float("inf"),
            feas_tol=feas_tol,
        )
    return SolveReport(status=Status.NUMERICAL_FAILURE, iterations=int(sol.iterations))
