"""Run configuration: INI-style files with strict validation.

A config file has two sections.  ``[scenario]`` holds :class:`ScenarioSpec`
fields; ``[experiment]`` selects the experiment kind, schemes, sweep grid,
setup count, master seed, and quality targets.  Unknown keys are rejected,
every value is validated, and ``emit_config(parse_config(path))`` reparses to
an equal config.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Optional, Sequence, Tuple

from .experiments.case_a import (
    DEFAULT_CRLB_MAX,
    DEFAULT_K_MAX,
    DEFAULT_POWER_BUDGET_A,
    SCHEMES_A,
)
from .experiments.case_b import (
    DEFAULT_ECHO_MIN_DBM,
    DEFAULT_POWER_BUDGET_B,
    DEFAULT_RATE_MIN,
    DEFAULT_TAU_SENSE,
    SCHEMES_B,
    default_case_b_spec,
)
from .scene import ScenarioSpec


class ConfigError(ValueError):
    """Raised for unparseable or invalid run configurations."""


DEFAULT_GAMMA_GRID = tuple(float(g) for g in range(0, 16, 2))
DEFAULT_ANTENNA_GRID = (8.0, 12.0, 16.0, 20.0)
DEFAULT_N_SETUPS = 100
EXPERIMENT_KINDS = ("case-a", "case-b")


@dataclass(frozen=True)
class RunConfig:
    """Fully-validated description of one experiment run."""

    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    kind: str = "case-a"
    schemes: Tuple[str, ...] = SCHEMES_A
    grid: Tuple[float, ...] = DEFAULT_GAMMA_GRID
    n_setups: int = DEFAULT_N_SETUPS
    master_seed: int = 0
    # case-a targets
    crlb_max: Optional[float] = DEFAULT_CRLB_MAX
    k_max: int = DEFAULT_K_MAX
    # case-b targets
    rate_min: float = DEFAULT_RATE_MIN
    echo_min_dbm: float = DEFAULT_ECHO_MIN_DBM
    tau_sense: float = DEFAULT_TAU_SENSE
    frame: float = 1.0
    fronthaul_cap: Optional[float] = None
    # shared
    power_budget: float = DEFAULT_POWER_BUDGET_A

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"experiment kind must be one of {EXPERIMENT_KINDS}")
        allowed = SCHEMES_A if self.kind == "case-a" else SCHEMES_B
        for s in self.schemes:
            if s not in allowed:
                raise ConfigError(f"unknown scheme {s!r} for {self.kind}")
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        if not self.grid:
            raise ConfigError("grid must be non-empty")
        if list(self.grid) != sorted(set(self.grid)):
            raise ConfigError("grid must be strictly increasing")
        if self.n_setups < 1:
            raise ConfigError("n_setups must be >= 1")
        if self.kind == "case-b":
            for n in self.grid:
                if n != int(n) or int(n) % self.scenario.n_bs != 0:
                    raise ConfigError(
                        "case-b grid entries must be integer antenna totals "
                        "divisible by n_bs"
                    )
        for name in ("power_budget", "rate_min", "tau_sense", "frame"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be finite and >= 0")


_SCENARIO_KEYS = {f.name for f in fields(ScenarioSpec)}
_EXPERIMENT_KEYS = {
    "kind",
    "schemes",
    "grid",
    "n_setups",
    "master_seed",
    "crlb_max",
    "k_max",
    "rate_min",
    "echo_min_dbm",
    "tau_sense",
    "frame",
    "fronthaul_cap",
    "power_budget",
}


def _parse_scalar(name: str, raw: str, kind: type):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"field {name!r}: cannot parse {raw!r}") from exc


def _parse_tuple(name: str, raw: str, kind: type) -> tuple:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    return tuple(_parse_scalar(name, s, kind) for s in items)


def _case_defaults(kind: str) -> Dict[str, object]:
    if kind == "case-a":
        return {
            "schemes": SCHEMES_A,
            "grid": DEFAULT_GAMMA_GRID,
            "power_budget": DEFAULT_POWER_BUDGET_A,
            "scenario": ScenarioSpec(),
        }
    return {
        "schemes": SCHEMES_B,
        "grid": DEFAULT_ANTENNA_GRID,
        "power_budget": DEFAULT_POWER_BUDGET_B,
        "scenario": default_case_b_spec(),
    }


def parse_config_text(text: str, source: str = "<string>") -> RunConfig:
    """Parse and validate a config from its text; see :func:`parse_config`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    for section in parser.sections():
        if section not in ("scenario", "experiment"):
            raise ConfigError(f"unknown section [{section}]")
        allowed = _SCENARIO_KEYS if section == "scenario" else _EXPERIMENT_KEYS
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    exp = parser["experiment"] if parser.has_section("experiment") else {}
    kind = exp.get("kind", "case-a").strip()
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"experiment kind must be one of {EXPERIMENT_KINDS}")
    defaults = _case_defaults(kind)

    scen_kwargs: Dict[str, object] = {}
    if parser.has_section("scenario"):
        for key, raw in parser["scenario"].items():
            if key == "antennas_per_bs":
                vals = _parse_tuple(key, raw, int)
                scen_kwargs[key] = vals[0] if len(vals) == 1 else vals
            elif key == "clutter_gain_range_db":
                vals = _parse_tuple(key, raw, float)
                if len(vals) != 2:
                    raise ConfigError("clutter_gain_range_db needs two values")
                scen_kwargs[key] = vals
            elif key in ("n_bs", "n_cu", "n_st", "n_clutter", "snapshots"):
                scen_kwargs[key] = _parse_scalar(key, raw, int)
            else:
                scen_kwargs[key] = _parse_scalar(key, raw, float)
    try:
        scenario = replace(defaults["scenario"], **scen_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    run_kwargs: Dict[str, object] = {
        "scenario": scenario,
        "kind": kind,
        "schemes": defaults["schemes"],
        "grid": defaults["grid"],
        "power_budget": defaults["power_budget"],
    }
    for key, raw in dict(exp).items():
        if key == "kind":
            continue
        if key == "schemes":
            run_kwargs[key] = _parse_tuple(key, raw, str)
        elif key == "grid":
            run_kwargs[key] = _parse_tuple(key, raw, float)
        elif key in ("n_setups", "master_seed", "k_max"):
            run_kwargs[key] = _parse_scalar(key, raw, int)
        elif key in ("crlb_max", "fronthaul_cap"):
            run_kwargs[key] = (
                None if raw.strip() == "none" else _parse_scalar(key, raw, float)
            )
        else:
            run_kwargs[key] = _parse_scalar(key, raw, float)
    try:
        return RunConfig(**run_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path: str) -> RunConfig:
    """Read, parse, and validate a run configuration file.

    Raises :class:`ConfigError` with the offending line or field named.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=path)


def emit_config(config: RunConfig) -> str:
    """Serialize a config so that parsing the result reproduces it exactly."""
    parser = configparser.ConfigParser(interpolation=None)
    scen = config.scenario
    parser["scenario"] = {}
    for f in fields(ScenarioSpec):
        value = getattr(scen, f.name)
        if isinstance(value, tuple):
            parser["scenario"][f.name] = ", ".join(repr(v) for v in value)
        else:
            parser["scenario"][f.name] = repr(value)
    parser["experiment"] = {
        "kind": config.kind,
        "schemes": ", ".join(config.schemes),
        "grid": ", ".join(repr(g) for g in config.grid),
        "n_setups": repr(config.n_setups),
        "master_seed": repr(config.master_seed),
        "crlb_max": "none" if config.crlb_max is None else repr(config.crlb_max),
        "k_max": repr(config.k_max),
        "rate_min": repr(config.rate_min),
        "echo_min_dbm": repr(config.echo_min_dbm),
        "tau_sense": repr(config.tau_sense),
        "frame": repr(config.frame),
        "fronthaul_cap": (
            "none" if config.fronthaul_cap is None else repr(config.fronthaul_cap)
        ),
        "power_budget": repr(config.power_budget),
    }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
