"""Interference-mitigation technique designs built on the solver kernels."""

from .assignment import Assignment
from .cmt import CmtOptions, cmt_design, verify_cmt
from .hdbf import flat_top_ideal, hdbf_design
from .ia import ia_design, ia_residual
from .sa import band_interference, conflict_graph_complete, sa_design
from .ts import TsOptions, dedicated_rrh, nearest_assoc, ts_design, ts_verify

__all__ = [
    "Assignment",
    "CmtOptions",
    "cmt_design",
    "verify_cmt",
    "flat_top_ideal",
    "hdbf_design",
    "ia_design",
    "ia_residual",
    "band_interference",
    "conflict_graph_complete",
    "sa_design",
    "TsOptions",
    "dedicated_rrh",
    "nearest_assoc",
    "ts_design",
    "ts_verify",
]
