"""Reusable optimization kernels shared by all mitigation techniques."""

from .report import SolveReport, Status
from .conic import ConicProblem, SecondOrderCone, solve_conic
from .iterative import (
    sca_minimize,
    ao_minimize,
    alternating_projection,
    projected_gradient_psd,
    project_psd,
    SurrogateContractError,
)
from .integer import (
    branch_and_bound,
    lpr_round,
    penalize_binary,
    big_m_product,
    BinaryProgram,
)
from .bilinear import bilinear_reformulate, BilinearEnvelope

__all__ = [
    "SolveReport",
    "Status",
    "ConicProblem",
    "SecondOrderCone",
    "solve_conic",
    "sca_minimize",
    "ao_minimize",
    "alternating_projection",
    "projected_gradient_psd",
    "project_psd",
    "SurrogateContractError",
    "branch_and_bound",
    "lpr_round",
    "penalize_binary",
    "big_m_product",
    "BinaryProgram",
    "bilinear_reformulate",
    "BilinearEnvelope",
]
