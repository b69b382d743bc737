"""Render figures from result CSVs.

Usage: ``netisac-render --kind <scene|infeasibility|energy|beampattern>
--in <csv> --out <img>``.  The input CSV must start with a
``# schema: <name> v1: col,col,...`` line matching the requested figure
kind; a mismatch exits nonzero naming the offending column or schema.
Rendering never mutates its inputs and is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """The CSV does not match the schema expected for the figure kind."""


class EmptyDataError(ValueError):
    """The CSV validates but holds no renderable curve/markers."""


EXPECTED_SCHEMAS = {
    "scene": ("scene", ["kind", "index", "x_m", "y_m", "antennas", "assoc"]),
    "infeasibility": (
        "case-a-sweep",
        ["scheme", "gamma_db", "infeasibility", "failures", "ci_halfwidth", "n_setups"],
    ),
    "energy": (
        "case-b-sweep",
        ["scheme", "n_antennas", "mean_energy_j", "ci_halfwidth", "n_setups"],
    ),
    "beampattern": ("beampattern", ["angle_deg", "gain", "ideal"]),
}


@dataclass
class FigureJob:
    """One rendering task: an input CSV, a figure kind, an output image."""

    input_csv: Path
    kind: str
    output: Path
    style: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EXPECTED_SCHEMAS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; expected one of "
                f"{sorted(EXPECTED_SCHEMAS)}"
            )


def read_table(path: Path, kind: str) -> List[Dict[str, str]]:
    """Read and validate a schema'd CSV; returns one dict per data row."""
    name, columns = EXPECTED_SCHEMAS[kind]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith("# schema: "):
            raise SchemaError(f"{path}: missing '# schema:' header line")
        declared = first[len("# schema: ") :]
        schema_name = declared.split(" ", 1)[0]
        if schema_name != name:
            raise SchemaError(
                f"{path}: schema {schema_name!r} does not match figure kind "
                f"{kind!r} (expected {name!r})"
            )
        declared_cols = [c.strip() for c in declared.split(":", 1)[1].split(",")]
        for want, got in zip(columns, declared_cols + [""] * len(columns)):
            if want != got:
                raise SchemaError(
                    f"{path}: schema column mismatch: expected {want!r}, got {got!r}"
                )
        reader = csv.DictReader(fh)
        if reader.fieldnames != columns:
            bad = next(
                (c for c in (reader.fieldnames or []) if c not in columns), "<missing>"
            )
            raise SchemaError(f"{path}: unexpected header column {bad!r}")
        rows = list(reader)
    if not rows:
        raise EmptyDataError(f"{path}: no data rows to plot")
    return rows


def _floats(rows: Sequence[Dict[str, str]], col: str) -> np.ndarray:
    try:
        return np.array([float(r[col]) for r in rows])
    except ValueError as exc:
        raise SchemaError(f"column {col!r} holds a non-numeric value: {exc}") from exc


# ---------------------------------------------------------------------------
# Renderers (each returns the Figure so tests can inspect it)
# ---------------------------------------------------------------------------
def render_scene(rows: Sequence[Dict[str, str]]) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    markers = {"bs": ("s", "tab:red"), "cu": ("o", "tab:blue"),
               "st": ("*", "tab:green"), "clutter": ("x", "tab:gray")}
    bs_xy: Dict[int, Tuple[float, float]] = {}
    for r in rows:
        if r["kind"] == "bs":
            bs_xy[int(r["index"])] = (float(r["x_m"]), float(r["y_m"]))
    seen = set()
    for r in rows:
        k = r["kind"]
        if k not in markers:
            raise SchemaError(f"column 'kind' holds unknown entity {k!r}")
        m, c = markers[k]
        ax.scatter(
            float(r["x_m"]), float(r["y_m"]), marker=m, color=c, s=80,
            label=k if k not in seen else None,
        )
        seen.add(k)
        assoc = int(r["assoc"])
        if k in ("cu", "st") and assoc >= 0 and assoc in bs_xy:
            bx, by = bs_xy[assoc]
            ax.annotate(
                "", xy=(bx, by), xytext=(float(r["x_m"]), float(r["y_m"])),
                arrowprops=dict(arrowstyle="->", color=c, alpha=0.6),
            )
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def _render_curves(
    rows: Sequence[Dict[str, str]],
    x_col: str,
    y_col: str,
    x_label: str,
    y_label: str,
    log_y: bool,
) -> plt.Figure:
    schemes: List[str] = []
    for r in rows:
        if r["scheme"] not in schemes:
            schemes.append(r["scheme"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for s in schemes:
        pts = [r for r in rows if r["scheme"] == s]
        x = _floats(pts, x_col)
        y = _floats(pts, y_col)
        if x.size == 0:
            raise EmptyDataError(f"scheme {s!r} has no points")
        ax.plot(x, y, marker="o", label=s)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if log_y:
        ax.set_yscale("log")
    else:
        ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    return fig


def render_infeasibility(rows: Sequence[Dict[str, str]]) -> plt.Figure:
    return _render_curves(
        rows, "gamma_db", "infeasibility",
        "minimum SINR (dB)", "infeasibility rate", log_y=False,
    )


def render_energy(rows: Sequence[Dict[str, str]]) -> plt.Figure:
    return _render_curves(
        rows, "n_antennas", "mean_energy_j",
        "total transmit antennas", "mean energy (J)", log_y=True,
    )


def render_beampattern(rows: Sequence[Dict[str, str]]) -> plt.Figure:
    angles = np.deg2rad(_floats(rows, "angle_deg"))
    gain = _floats(rows, "gain")
    ideal = _floats(rows, "ideal")
    fig, ax = plt.subplots(figsize=(5.5, 5.5), subplot_kw={"projection": "polar"})
    ax.plot(angles, gain, label="designed")
    ax.plot(angles, ideal, linestyle="--", label="ideal")
    ax.set_thetamin(-90)
    ax.set_thetamax(90)
    ax.set_xlabel("gain vs angle (deg)")
    ax.legend(loc="lower center")
    fig.tight_layout()
    return fig


RENDERERS = {
    "scene": render_scene,
    "infeasibility": render_infeasibility,
    "energy": render_energy,
    "beampattern": render_beampattern,
}


def render(job: FigureJob) -> plt.Figure:
    """Validate, render, and save one figure; returns the Figure object."""
    rows = read_table(job.input_csv, job.kind)
    fig = RENDERERS[job.kind](rows)
    job.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(job.output, dpi=int(job.style.get("dpi", 120)))
    return fig


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="netisac-render", description="Render a figure from a result CSV"
    )
    parser.add_argument("--kind", required=True, choices=sorted(EXPECTED_SCHEMAS))
    parser.add_argument("--in", dest="input", required=True, help="input CSV path")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=120)
    args = parser.parse_args(argv)
    job = FigureJob(
        input_csv=Path(args.input),
        kind=args.kind,
        output=Path(args.out),
        style={"dpi": args.dpi},
    )
    try:
        fig = render(job)
        plt.close(fig)
    except (SchemaError, EmptyDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {job.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
