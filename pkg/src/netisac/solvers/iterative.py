"""Iterative kernels: SCA, alternating optimization, alternating projection,
and projected gradient on the PSD cone."""

from __future__ import annotations

from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from .report import SolveReport, Status

MONOTONE_SLACK = 1e-9


class SurrogateContractError(RuntimeError):
    """The surrogate is not tight at its expansion point."""


def _as_report_x(x: Any, report: SolveReport) -> SolveReport:
    if isinstance(x, np.ndarray):
        report.x = x
    else:
        report.extras["solution"] = x
    return report


def sca_minimize(
    objective: Callable[[Any], float],
    surrogate_builder: Callable[[Any], Tuple[Callable[[Any], float], Callable[[], Any]]],
    x0: Any,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> SolveReport:
    """Successive convex approximation.

    ``surrogate_builder(x_t)`` returns ``(surrogate_value, minimize_step)``
    where the surrogate majorizes the objective and is tight at ``x_t``
    (caller contract; tightness is verified), and ``minimize_step()`` returns
    the minimizer of the surrogate, optionally as ``(x, SolveReport)``.
    The true-objective trace is asserted non-increasing on every run.
    """
    x = x0
    f = objective(x)
    trace = [f]
    for it in range(1, max_iter + 1):
        surrogate, step = surrogate_builder(x)
        s0 = surrogate(x)
        if abs(s0 - f) > 1e-7 * (1.0 + abs(f)):
            raise SurrogateContractError(
                f"surrogate({s0:.6e}) != objective({f:.6e}) at expansion point"
            )
        result = step()
        if isinstance(result, tuple):
            x_next, sub = result
            if sub is not None and sub.status == Status.INFEASIBLE:
                return SolveReport(
                    status=Status.INFEASIBLE, iterations=it, trace=trace
                )
            if sub is not None and sub.status not in (Status.OPTIMAL,):
                return SolveReport(
                    status=Status.NUMERICAL_FAILURE, iterations=it, trace=trace
                )
        else:
            x_next = result
        f_next = objective(x_next)
        if f_next > f + MONOTONE_SLACK * (1.0 + abs(f)):
            raise SurrogateContractError(
                f"objective increased {f:.6e} -> {f_next:.6e}; surrogate does not majorize"
            )
        trace.append(f_next)
        decrease = f - f_next
        x, f = x_next, f_next
        if decrease <= tol * (1.0 + abs(f)):
            rep = SolveReport(status=Status.OPTIMAL, objective=f, iterations=it, trace=trace)
            return _as_report_x(x, rep)
    rep = SolveReport(
        status=Status.ITERATION_LIMIT, objective=f, iterations=max_iter, trace=trace
    )
    return _as_report_x(x, rep)


def ao_minimize(
    objective: Callable[[Any], float],
    blocks: Sequence[Callable[[Any], Any]],
    x0: Any,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> SolveReport:
    """Alternating optimization over variable blocks.

    Each block update maps the full solution to a new one with that block
    re-optimized; infeasibility from a block propagates.  The objective is
    asserted non-increasing across block updates.
    """
    x = x0
    f = objective(x)
    trace = [f]
    for sweep in range(1, max_iter + 1):
        f_before = f
        for block in blocks:
            result = block(x)
            if isinstance(result, tuple):
                x_next, sub = result
                if sub is not None and sub.status == Status.INFEASIBLE:
                    return SolveReport(status=Status.INFEASIBLE, iterations=sweep, trace=trace)
                if sub is not None and sub.status != Status.OPTIMAL:
                    return SolveReport(
                        status=Status.NUMERICAL_FAILURE, iterations=sweep, trace=trace
                    )
            else:
                x_next = result
            f_next = objective(x_next)
            if f_next > f + MONOTONE_SLACK * (1.0 + abs(f)):
                raise RuntimeError(
                    f"AO objective increased {f:.6e} -> {f_next:.6e}"
                )
            x, f = x_next, f_next
            trace.append(f)
        if f_before - f <= tol * (1.0 + abs(f)):
            rep = SolveReport(status=Status.OPTIMAL, objective=f, iterations=sweep, trace=trace)
            return _as_report_x(x, rep)
    rep = SolveReport(
        status=Status.ITERATION_LIMIT, objective=f, iterations=max_iter, trace=trace
    )
    return _as_report_x(x, rep)


# ---------------------------------------------------------------------------
# Alternating projection
# ---------------------------------------------------------------------------
def _truncated_svd(x: np.ndarray, rank: int) -> np.ndarray:
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    s[rank:] = 0.0
    return (u * s) @ vh


def alternating_projection(
    project_affine: Callable[[np.ndarray], np.ndarray],
    rank: int,
    x0: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> Tuple[np.ndarray, SolveReport]:
    """Alternate between an affine set and the rank <= r matrix set.

    ``project_affine`` must be an exact (orthogonal) projection.  The rank
    projection is the truncated SVD.  The inter-set gap is non-increasing per
    cycle; returns when both residuals fall below ``tol`` or the gap stops
    shrinking.
    """
    x = np.asarray(x0, dtype=complex)
    gaps: List[float] = []
    prev_gap = np.inf
    for it in range(1, max_iter + 1):
        y = project_affine(x)
        x_next = _truncated_svd(y, rank)
        gap = float(np.linalg.norm(y - x_next))
        if gap > prev_gap + MONOTONE_SLACK * (1.0 + prev_gap):
            raise RuntimeError("alternating projection gap increased")
        gaps.append(gap)
        affine_res = float(np.linalg.norm(project_affine(x_next) - x_next))
        x = x_next
        if gap < tol and affine_res < tol:
            return x, SolveReport(
                status=Status.OPTIMAL,
                objective=gap,
                iterations=it,
                trace=gaps,
                extras={"affine_residual": affine_res, "gap": gap},
            )
        if abs(prev_gap - gap) <= 1e-14 * (1.0 + gap) and it > 5:
            break
        prev_gap = gap
    affine_res = float(np.linalg.norm(project_affine(x) - x))
    return x, SolveReport(
        status=Status.ITERATION_LIMIT,
        objective=gaps[-1] if gaps else float("inf"),
        iterations=len(gaps),
        trace=gaps,
        extras={"affine_residual": affine_res, "gap": gaps[-1] if gaps else float("inf")},
    )


# ---------------------------------------------------------------------------
# Projected gradient on the PSD cone
# ---------------------------------------------------------------------------
def project_psd(m: np.ndarray) -> np.ndarray:
    """Frobenius-nearest Hermitian PSD matrix (eigenvalue clipping)."""
    h = (m + m.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def _project_psd_trace(m: np.ndarray, trace_cap: float) -> np.ndarray:
    r = project_psd(m)
    tr = float(np.trace(r).real)
    if tr > trace_cap and tr > 0:
        r = r * (trace_cap / tr)
    return r


def projected_gradient_psd(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    r0: np.ndarray,
    trace_cap: float,
    tol: float = 1e-9,
    max_iter: int = 2000,
    step0: float = 1.0,
) -> Tuple[np.ndarray, SolveReport]:
    """Minimize a smooth objective over {R PSD, tr(R) <= P} first-order.

    Projection is eigenvalue clipping followed by a trace rescale; the step
    uses backtracking so the objective trace is monotone.
    """
    r0 = np.asarray(r0, dtype=complex)
    if np.linalg.norm(r0 - r0.conj().T) > 1e-10 * max(1.0, np.linalg.norm(r0)):
        raise ValueError("initial matrix must be Hermitian")
    r = _project_psd_trace(r0, trace_cap)
    f = objective(r)
    trace = [f]
    step = step0
    for it in range(1, max_iter + 1):
        g = gradient(r)
        g = (g + g.conj().T) / 2.0
        gn = float(np.linalg.norm(g))
        if gn < 1e-15:
            break
        improved = False
        for _ in range(60):
            cand = _project_psd_trace(r - step * g, trace_cap)
            f_cand = objective(cand)
            if f_cand <= f - 1e-12 * abs(f):
                improved = True
                break
            step /= 2.0
        if not improved:
            break
        move = float(np.linalg.norm(cand - r))
        r, f = cand, f_cand
        trace.append(f)
        step *= 1.5
        if move < tol * (1.0 + float(np.linalg.norm(r))):
            break
    return r, SolveReport(
        status=Status.OPTIMAL, objective=f, iterations=len(trace) - 1, trace=trace
    )
