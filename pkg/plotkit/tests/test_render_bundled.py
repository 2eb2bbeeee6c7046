"""Acceptance: render every table from real engine runs of the bundled
fig2 and fig6 configurations, one image per CSV, with correct axis labels.

The engine is invoked only through its command line here, so the renderer
itself never imports it.
"""

import json
import subprocess
import sys

import pytest

import plotkit.panels as panels
from plotkit import PanelSpec, load_table, render, render_all


@pytest.fixture(scope="session")
def bundled_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("engine_runs")
    for name in ("fig2", "fig6"):
        proc = subprocess.run(
            [sys.executable, "-m", "spinmetro.cli", "run",
             "--config", name, "--out", str(root)],
            capture_output=True, text=True, timeout=600)
        assert proc.returncode == 0, proc.stderr
    return root


@pytest.mark.parametrize("name", ["fig2", "fig6"])
def test_render_all_bundled(bundled_runs, tmp_path, name):
    run_dir = bundled_runs / name
    manifest = run_dir / "manifest.json"
    entries = json.loads(manifest.read_text())["tables"]
    csvs = sorted(run_dir.glob("*.csv"))
    assert len(csvs) == len(entries) and len(csvs) > 0

    out = tmp_path / name
    written = render_all(str(manifest), str(out))
    images = sorted(out.glob("*.png"))
    assert len(images) == len(csvs)
    assert sorted(p.stem for p in images) == sorted(p.stem for p in csvs)
    for p in images:
        assert p.stat().st_size > 0


def test_bundled_axis_labels(bundled_runs, tmp_path, monkeypatch):
    """First column drives the x axis; curve panels label each column."""
    captured = {}
    orig = panels._finish

    def spy(fig, spec):
        ax = fig.axes[0]
        captured[spec.csv_path] = (ax.get_xlabel(), ax.get_ylabel())
        return orig(fig, spec)

    monkeypatch.setattr(panels, "_finish", spy)
    for name in ("fig2", "fig6"):
        run_dir = bundled_runs / name
        entries = json.loads((run_dir / "manifest.json").read_text())
        for entry in entries["tables"]:
            csv_path = str(run_dir / f"{entry['name']}.csv")
            table = load_table(csv_path)
            render(PanelSpec(csv_path=csv_path, kind=entry["kind"],
                             out_path=str(tmp_path / f"{entry['name']}.png"),
                             meta=entry.get("meta", {})))
            xlabel, ylabel = captured[csv_path]
            assert xlabel == table.columns[0]
            assert ylabel != ""
