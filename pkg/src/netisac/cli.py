"""Command-line entry point: seeded experiment runs and artifact emission.

Subcommands
-----------
``generate-scene``
    Draw one network layout and write it as a CSV of positions/associations.
``run``
    Solve a single setup (one seed) at the first grid point for each
    configured scheme; writes a per-scheme results CSV and optional traces.
``sweep``
    Full Monte-Carlo sweep; writes the sweep CSV, a run manifest, and a
    rendered figure next to the CSV.
``demo-technique <name>``
    Small self-contained demo of one design technique (cmt, ia, hdbf, ts, sa).

All randomness flows from the single master seed.  Exit codes: 0 success,
2 configuration error, 3 solver contract violation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, emit_config, parse_config
from .constants import dbm_to_watts
from .metrics import QosTargets, beampattern
from .scene import generate_channels, generate_scene
from .solvers import SurrogateContractError
from .experiments import (
    SweepResult,
    run_case_a,
    run_case_b,
    sweep_energy_vs_antennas,
    sweep_infeasibility,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3
EXIT_IO = 4

SCENE_SCHEMA = "scene v1: kind,index,x_m,y_m,antennas,assoc"
CASE_A_SCHEMA = "case-a-sweep v1: scheme,gamma_db,infeasibility,failures,ci_halfwidth,n_setups"
CASE_B_SCHEMA = "case-b-sweep v1: scheme,n_antennas,mean_energy_j,ci_halfwidth,n_setups"
RUN_SCHEMA = "single-run v1: scheme,axis_value,feasible,objective"
TRACE_SCHEMA = "solver-trace v1: scheme,iteration,objective"
BEAMPATTERN_SCHEMA = "beampattern v1: angle_deg,gain,ideal"


def _write_csv(path: Path, schema: str, rows: Iterable[Sequence]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# schema: {schema}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([c.strip() for c in schema.split(":", 1)[1].split(",")])
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise _IoError(f"cannot write {path}: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


class _IoError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Artifact emission
# ---------------------------------------------------------------------------
def _scene_rows(config: RunConfig, seed: int) -> List[Sequence]:
    scene = generate_scene(config.scenario, seed)
    rows: List[Sequence] = []
    for b in range(config.scenario.n_bs):
        x, y = scene.bs_positions[b]
        rows.append(["bs", b, float(x), float(y), scene.bs_antennas[b], -1])
    for k in range(config.scenario.n_cu):
        x, y = scene.cu_positions[k]
        d = [
            float(np.linalg.norm(scene.bs_positions[b] - scene.cu_positions[k]))
            for b in range(config.scenario.n_bs)
        ]
        rows.append(["cu", k, float(x), float(y), 0, int(np.argmin(d))])
    for t in range(config.scenario.n_st):
        x, y = scene.st_positions[t]
        d = [
            float(np.linalg.norm(scene.bs_positions[b] - scene.st_positions[t]))
            for b in range(config.scenario.n_bs)
        ]
        rows.append(["st", t, float(x), float(y), 0, int(np.argmin(d))])
    for c in range(config.scenario.n_clutter):
        x, y = scene.clutter_positions[c]
        rows.append(["clutter", c, float(x), float(y), 0, -1])
    return rows


def _write_manifest(out_dir: Path, config: RunConfig, result: SweepResult) -> None:
    manifest = {
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config": emit_config(config),
        "seeds": [int(s) for s in result.seeds],
    }
    try:
        with open(out_dir / "run_manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise _IoError(f"cannot write manifest: {exc}") from exc


def _render_sweep_figure(out_dir: Path, config: RunConfig, result: SweepResult) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme in config.schemes:
        ax.plot(result.axis, result.curves[scheme], marker="o", label=scheme)
    if config.kind == "case-a":
        ax.set_xlabel("minimum SINR (dB)")
        ax.set_ylabel("infeasibility rate")
        ax.set_ylim(-0.02, 1.02)
        name = "infeasibility.png"
    else:
        ax.set_xlabel("total transmit antennas")
        ax.set_ylabel("mean energy (J)")
        ax.set_yscale("log")
        name = "energy.png"
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    try:
        fig.savefig(out_dir / name, dpi=120)
    except OSError as exc:
        raise _IoError(f"cannot write figure: {exc}") from exc
    finally:
        plt.close(fig)


def _sweep_rows(config: RunConfig, result: SweepResult) -> List[Sequence]:
    rows: List[Sequence] = []
    for scheme in config.schemes:
        for i, axis in enumerate(result.axis):
            if config.kind == "case-a":
                rows.append(
                    [
                        scheme,
                        float(axis),
                        float(result.curves[scheme][i]),
                        float(result.failures[scheme][i]),
                        float(result.ci_halfwidth[scheme][i]),
                        result.n_setups,
                    ]
                )
            else:
                rows.append(
                    [
                        scheme,
                        int(axis),
                        float(result.curves[scheme][i]),
                        float(result.ci_halfwidth[scheme][i]),
                        result.n_setups,
                    ]
                )
    return rows


def run_sweep(config: RunConfig, out_dir: Path) -> SweepResult:
    """Execute the configured Monte-Carlo sweep and write all artifacts."""
    if config.kind == "case-a":
        result = sweep_infeasibility(
            config.scenario,
            config.grid,
            config.n_setups,
            schemes=config.schemes,
            crlb_max=config.crlb_max,
            power_budget=config.power_budget,
            k_max=config.k_max,
            master_seed=config.master_seed,
        )
        _write_csv(out_dir / "case_a_results.csv", CASE_A_SCHEMA, _sweep_rows(config, result))
    else:
        result = sweep_energy_vs_antennas(
            config.scenario,
            [int(n) for n in config.grid],
            config.n_setups,
            schemes=config.schemes,
            rate_min=config.rate_min,
            echo_min_dbm=config.echo_min_dbm,
            fronthaul_cap=config.fronthaul_cap,
            power_budget=config.power_budget,
            tau_sense=config.tau_sense,
            frame=config.frame,
            master_seed=config.master_seed,
        )
        _write_csv(out_dir / "case_b_results.csv", CASE_B_SCHEMA, _sweep_rows(config, result))
    _write_manifest(out_dir, config, result)
    _render_sweep_figure(out_dir, config, result)
    return result


def run_single(config: RunConfig, out_dir: Path, trace_path: Optional[Path]) -> None:
    """Solve one setup per scheme at the first grid point; write results."""
    rows: List[Sequence] = []
    traces: List[Sequence] = []
    axis0 = config.grid[0]
    for scheme in config.schemes:
        if config.kind == "case-a":
            report, assignment, _plan = run_case_a(
                config.scenario,
                config.master_seed,
                scheme,
                gamma_db=axis0,
                crlb_max=config.crlb_max,
                power_budget=config.power_budget,
                k_max=config.k_max,
            )
            feasible = assignment is not None
            objective = report.objective
        else:
            report, energy, assignment, _plans = run_case_b(
                config.scenario,
                config.master_seed,
                scheme,
                int(axis0),
                rate_min=config.rate_min,
                echo_min_dbm=config.echo_min_dbm,
                fronthaul_cap=config.fronthaul_cap,
                power_budget=config.power_budget,
                tau_sense=config.tau_sense,
                frame=config.frame,
            )
            feasible = assignment is not None
            objective = energy
        rows.append([scheme, float(axis0), int(feasible), float(objective)])
        for i, val in enumerate(report.trace):
            traces.append([scheme, i, float(val)])
    _write_csv(out_dir / "single_run.csv", RUN_SCHEMA, rows)
    if trace_path is not None:
        _write_csv(trace_path, TRACE_SCHEMA, traces)


# ---------------------------------------------------------------------------
# Technique demos
# ---------------------------------------------------------------------------
def demo_technique(name: str, config: RunConfig, out_dir: Path, seed: int) -> None:
    from .techniques import (
        TsOptions,
        cmt_design,
        hdbf_design,
        ia_design,
        sa_design,
        ts_design,
    )

    spec = config.scenario
    scene = generate_scene(spec, seed)
    channels = generate_channels(scene, spec, seed)

    if name == "cmt":
        targets = QosTargets(
            sinr_min_db=8.0, crlb_max=config.crlb_max, power_budget=config.power_budget
        )
        assignment, plan, report = cmt_design(
            scene, channels, spec, targets, config.k_max
        )
        feasible = assignment is not None
        power = plan.total_power() if plan is not None else float("nan")
        print(f"cmt: feasible={feasible} total_power={power:.3e} W")
    elif name == "ia":
        cu = [channels.comm[(0, k)] for k in range(min(spec.n_cu, 3))]
        n = len(cu[0])
        sense = np.exp(1j * np.pi * np.arange(n) * 0.3)
        plan, decoders, report = ia_design(cu, sense)
        print(f"ia: residual={report.objective:.3e} decoders={len(decoders)}")
    elif name == "hdbf":
        n = scene.bs_antennas[0]
        grid = np.linspace(-np.pi / 2, np.pi / 2, 181)
        window = (-np.deg2rad(5.0), np.deg2rad(5.0))
        cov, report = hdbf_design(n, window, grid, power=1.0)
        gains = [float(beampattern(cov, th)) for th in grid]
        ideal = [
            1.0 * n if window[0] <= th <= window[1] else 0.0 for th in grid
        ]
        rows = [
            [float(np.rad2deg(th)), g, i] for th, g, i in zip(grid, gains, ideal)
        ]
        _write_csv(out_dir / "beampattern.csv", BEAMPATTERN_SCHEMA, rows)
        print(f"hdbf: mse={report.objective:.4e} -> {out_dir / 'beampattern.csv'}")
    elif name == "ts":
        if config.kind != "case-b":
            # Time splitting belongs to the distributed-network experiment;
            # fall back to its scenario preset and budget.
            from .experiments import DEFAULT_POWER_BUDGET_B, default_case_b_spec

            spec = default_case_b_spec(spec)
            scene = generate_scene(spec, seed)
            channels = generate_channels(scene, spec, seed)
            budget = DEFAULT_POWER_BUDGET_B
        else:
            budget = config.power_budget
        targets = QosTargets(
            rate_min=config.rate_min,
            echo_min=dbm_to_watts(config.echo_min_dbm) if spec.n_st else None,
            power_budget=budget,
        )
        assignment, plans, energy, report = ts_design(
            scene, channels, spec, targets, frame=config.frame, options=TsOptions()
        )
        print(f"ts: feasible={assignment is not None} energy={energy:.3e} J")
    elif name == "sa":
        demands = [2, 1, 1]
        assignment, report = sa_design(demands, n_subcarriers=6)
        bands = (
            assignment.subcarrier_assign.sum() if assignment is not None else 0
        )
        print(f"sa: status={report.status.value} bands_used={int(bands)}")
    else:
        raise ConfigError(f"unknown technique {name!r}")


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------
def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netisac",
        description="Network-level ISAC interference-mitigation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in ("generate-scene", "run", "sweep"):
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="path to an INI run configuration")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--trace", help="write solver traces to this CSV path")
    p = sub.add_parser("demo-technique")
    p.add_argument("name", choices=["cmt", "ia", "hdbf", "ts", "sa"])
    p.add_argument("--config", help="path to an INI run configuration")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--trace", help="write solver traces to this CSV path")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            config = replace(config, master_seed=args.seed)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)

        if args.command == "generate-scene":
            rows = _scene_rows(config, config.master_seed)
            _write_csv(out_dir / "scene.csv", SCENE_SCHEMA, rows)
            print(f"wrote {out_dir / 'scene.csv'}")
        elif args.command == "run":
            trace = Path(args.trace) if args.trace else None
            run_single(config, out_dir, trace)
            print(f"wrote {out_dir / 'single_run.csv'}")
        elif args.command == "sweep":
            result = run_sweep(config, out_dir)
            name = "case_a_results.csv" if config.kind == "case-a" else "case_b_results.csv"
            print(f"wrote {out_dir / name} ({result.n_setups} setups)")
        elif args.command == "demo-technique":
            demo_technique(args.name, config, out_dir, config.master_seed)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SurrogateContractError, AssertionError) as exc:
        print(f"solver contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (_IoError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
