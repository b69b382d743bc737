"""Monte-Carlo experiment drivers for both network case studies."""

from .case_a import (
    DEFAULT_CRLB_MAX,
    DEFAULT_K_MAX,
    DEFAULT_POWER_BUDGET_A,
    SCHEMES_A,
    run_case_a,
    sweep_infeasibility,
)
from .case_b import (
    DEFAULT_ECHO_MIN_DBM,
    DEFAULT_POWER_BUDGET_B,
    DEFAULT_RATE_MIN,
    DEFAULT_RCS_GAIN_DB_B,
    DEFAULT_TAU_SENSE,
    SCHEMES_B,
    default_case_b_spec,
    run_case_b,
    sweep_energy_vs_antennas,
    zero_pad_plan,
)
from .results import SweepResult, binomial_halfwidth, derive_seeds, mean_halfwidth

__all__ = [
    "DEFAULT_CRLB_MAX",
    "DEFAULT_K_MAX",
    "DEFAULT_POWER_BUDGET_A",
    "DEFAULT_ECHO_MIN_DBM",
    "DEFAULT_POWER_BUDGET_B",
    "DEFAULT_RATE_MIN",
    "DEFAULT_RCS_GAIN_DB_B",
    "DEFAULT_TAU_SENSE",
    "SCHEMES_A",
    "SCHEMES_B",
    "default_case_b_spec",
    "run_case_a",
    "run_case_b",
    "sweep_infeasibility",
    "sweep_energy_vs_antennas",
    "zero_pad_plan",
    "SweepResult",
    "binomial_halfwidth",
    "derive_seeds",
    "mean_halfwidth",
]
