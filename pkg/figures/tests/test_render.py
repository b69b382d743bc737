"""Rendering tests driven by golden CSVs produced by the experiment CLI."""

import subprocess
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from netisac_figures.render import (
    EmptyDataError,
    FigureJob,
    SchemaError,
    read_table,
    render,
)

GOLDEN = Path(__file__).parent / "golden"

KIND_TO_CSV = {
    "scene": GOLDEN / "scene.csv",
    "infeasibility": GOLDEN / "case_a_results.csv",
    "energy": GOLDEN / "case_b_results.csv",
    "beampattern": GOLDEN / "beampattern.csv",
}


@pytest.mark.parametrize("kind", sorted(KIND_TO_CSV))
def test_all_kinds_render_from_golden(kind, tmp_path):
    out = tmp_path / f"{kind}.png"
    fig = render(FigureJob(input_csv=KIND_TO_CSV[kind], kind=kind, output=out))
    try:
        assert out.stat().st_size > 0
    finally:
        plt.close(fig)


def test_infeasibility_curves_and_labels(tmp_path):
    fig = render(
        FigureJob(
            input_csv=KIND_TO_CSV["infeasibility"],
            kind="infeasibility",
            output=tmp_path / "f.png",
        )
    )
    try:
        ax = fig.axes[0]
        assert len(ax.lines) == 4  # one curve per scheme
        assert ax.get_xlabel() == "minimum SINR (dB)"
        assert ax.get_ylabel() == "infeasibility rate"
        labels = [line.get_label() for line in ax.lines]
        assert labels == ["proposed", "baseline1", "baseline2", "baseline3"]
    finally:
        plt.close(fig)


def test_energy_curves_and_labels(tmp_path):
    fig = render(
        FigureJob(
            input_csv=KIND_TO_CSV["energy"], kind="energy", output=tmp_path / "e.png"
        )
    )
    try:
        ax = fig.axes[0]
        assert len(ax.lines) == 3
        assert ax.get_xlabel() == "total transmit antennas"
        assert ax.get_ylabel() == "mean energy (J)"
        assert ax.get_yscale() == "log"
    finally:
        plt.close(fig)


def test_scene_marker_count_matches_rows(tmp_path):
    rows = read_table(KIND_TO_CSV["scene"], "scene")
    fig = render(
        FigureJob(
            input_csv=KIND_TO_CSV["scene"], kind="scene", output=tmp_path / "s.png"
        )
    )
    try:
        ax = fig.axes[0]
        assert len(ax.collections) == len(rows)  # one marker per entity
        arrows = [a for a in ax.texts + ax.artists]  # annotations live elsewhere
        # association arrows: one per cu/st row with a nonnegative assignment
        expected_arrows = sum(
            1 for r in rows if r["kind"] in ("cu", "st") and int(r["assoc"]) >= 0
        )
        n_annot = sum(1 for child in ax.get_children() if hasattr(child, "arrow_patch"))
        assert n_annot == expected_arrows
    finally:
        plt.close(fig)


def test_schema_mismatch_names_problem(tmp_path):
    with pytest.raises(SchemaError, match="scene"):
        read_table(KIND_TO_CSV["scene"], "energy")


def test_wrong_column_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(
        "# schema: case-a-sweep v1: scheme,gamma_db,wrongcol,failures,ci_halfwidth,n_setups\n"
        "scheme,gamma_db,wrongcol,failures,ci_halfwidth,n_setups\n"
        "proposed,0.0,0.0,0.0,0.0,2\n"
    )
    with pytest.raises(SchemaError, match="infeasibility"):
        read_table(bad, "infeasibility")


def test_empty_curve_is_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(
        "# schema: case-a-sweep v1: scheme,gamma_db,infeasibility,failures,ci_halfwidth,n_setups\n"
        "scheme,gamma_db,infeasibility,failures,ci_halfwidth,n_setups\n"
    )
    with pytest.raises(EmptyDataError):
        read_table(empty, "infeasibility")


def test_missing_schema_line(tmp_path):
    bad = tmp_path / "noschema.csv"
    bad.write_text("scheme,gamma_db\nproposed,0.0\n")
    with pytest.raises(SchemaError, match="schema"):
        read_table(bad, "infeasibility")


class TestCli:
    def run(self, args):
        return subprocess.run(
            [sys.executable, "-m", "netisac_figures.render", *args],
            capture_output=True,
            text=True,
        )

    def test_cli_renders(self, tmp_path):
        out = tmp_path / "fig.png"
        res = self.run(
            [
                "--kind",
                "infeasibility",
                "--in",
                str(KIND_TO_CSV["infeasibility"]),
                "--out",
                str(out),
            ]
        )
        assert res.returncode == 0, res.stderr
        assert out.stat().st_size > 0

    def test_cli_schema_mismatch_exit_code(self, tmp_path):
        res = self.run(
            [
                "--kind",
                "energy",
                "--in",
                str(KIND_TO_CSV["scene"]),
                "--out",
                str(tmp_path / "x.png"),
            ]
        )
        assert res.returncode == 2
        assert "scene" in res.stderr

    def test_cli_pixel_stable(self, tmp_path):
        blobs = []
        for name in ("a.png", "b.png"):
            out = tmp_path / name
            res = self.run(
                [
                    "--kind",
                    "beampattern",
                    "--in",
                    str(KIND_TO_CSV["beampattern"]),
                    "--out",
                    str(out),
                ]
            )
            assert res.returncode == 0, res.stderr
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_input_not_mutated(self, tmp_path):
        before = KIND_TO_CSV["scene"].read_bytes()
        self.run(
            ["--kind", "scene", "--in", str(KIND_TO_CSV["scene"]), "--out", str(tmp_path / "s.png")]
        )
        assert KIND_TO_CSV["scene"].read_bytes() == before
