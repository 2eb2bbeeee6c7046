"""Panel rendering for simulation CSV tables.

Each table kind written by the simulation CLI maps to one panel layout:

- ``curve``       first column on x, remaining numeric columns as lines
- ``multi_curve`` wide (x + one column per curve) or long (group, x, y)
- ``sphere``      (theta, phi, value): two orthographic hemisphere views
                  plus an unrolled (theta, phi) map
- ``scaling``     per-N scan results: one subplot per scanned quantity
- ``summary``     (label, x, y, ...) rows: y vs x, one line per label
- ``bloch``       Bloch-vector components over time
- ``heatmap``     (row, col, real, imag) matrix entries: two images
"""

import csv
import json
import os
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class PlotkitError(RuntimeError):
    """Base class for rendering failures."""


class MissingColumnError(PlotkitError):
    """A referenced CSV column does not exist."""


class EmptyTableError(PlotkitError):
    """The CSV contains a header but no data rows."""


PANEL_KINDS = ("curve", "multi_curve", "sphere", "scaling", "summary",
               "bloch", "heatmap")


@dataclass(frozen=True)
class PanelSpec:
    """One CSV table to render into one image file."""

    csv_path: str
    kind: str
    out_path: str
    title: str = ""
    logy: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise PlotkitError(f"unknown panel kind {self.kind!r}; "
                               f"expected one of {PANEL_KINDS}")


@dataclass(frozen=True)
class Table:
    columns: tuple
    data: dict          # column name -> np.ndarray (float or object)
    header: tuple       # '#' provenance lines, stripped

    def __len__(self):
        return 0 if not self.columns else len(self.data[self.columns[0]])

    def require(self, *names) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise MissingColumnError(
                f"missing column(s) {missing} in table with columns "
                f"{list(self.columns)}")

    def numeric(self, name: str) -> np.ndarray:
        self.require(name)
        col = self.data[name]
        if col.dtype == object:
            raise PlotkitError(f"column {name!r} is not numeric")
        return col


def load_table(path: str) -> Table:
    """Parse a CSV with '#' provenance lines and a single header row."""
    header, rows = [], []
    columns = None
    with open(path, newline="") as fh:
        for record in csv.reader(fh):
            if not record:
                continue
            if record[0].startswith("#"):
                header.append(",".join(record).lstrip("# "))
                continue
            if columns is None:
                columns = tuple(record)
                continue
            rows.append(record)
    if columns is None:
        raise EmptyTableError(f"{path}: no header row")
    if not rows:
        raise EmptyTableError(f"{path}: no data rows")
    data = {}
    for k, name in enumerate(columns):
        raw = [r[k] for r in rows]
        try:
            data[name] = np.array([float(v) for v in raw])
        except ValueError:
            data[name] = np.array(raw, dtype=object)
    return Table(columns=columns, data=data, header=tuple(header))


# ---------------------------------------------------------------------------
# per-kind renderers
# ---------------------------------------------------------------------------

def _finish(fig, spec: PanelSpec) -> str:
    os.makedirs(os.path.dirname(spec.out_path) or ".", exist_ok=True)
    fig.savefig(spec.out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return spec.out_path


def _render_curve(table: Table, spec: PanelSpec):
    x_name = spec.meta.get("x", table.columns[0])
    x = table.numeric(x_name)
    y_names = [c for c in table.columns if c != x_name]
    if not y_names:
        raise MissingColumnError("curve table needs at least one y column")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for name in y_names:
        ax.plot(x, table.numeric(name), label=name)
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_names[0] if len(y_names) == 1 else "value")
    if len(y_names) > 1:
        ax.legend(frameon=False)
    if spec.logy:
        ax.set_yscale("log")
    ax.set_title(spec.title)
    return _finish(fig, spec)


def _render_multi_curve(table: Table, spec: PanelSpec):
    cols = list(table.columns)
    fig, ax = plt.subplots(figsize=(5, 3.4))
    if len(cols) == 3 and cols[1] in ("t", "x"):
        # long format: (group, x, y)
        group_name, x_name, y_name = cols
        table.require(group_name, x_name, y_name)
        groups = table.numeric(group_name)
        x = table.numeric(x_name)
        y = table.numeric(y_name)
        for g in np.unique(groups):
            sel = groups == g
            order = np.argsort(x[sel])
            ax.plot(x[sel][order], y[sel][order],
                    label=f"{group_name}={g:g}")
        ax.set_xlabel(x_name)
        ax.set_ylabel(y_name)
    else:
        # wide format: x + one column per curve
        x_name = cols[0]
        x = table.numeric(x_name)
        for name in cols[1:]:
            ax.plot(x, table.numeric(name), label=name)
        ax.set_xlabel(x_name)
        ax.set_ylabel(spec.meta.get("quantity", "value"))
    ax.legend(frameon=False, fontsize=8)
    if spec.logy:
        ax.set_yscale("log")
    ax.set_title(spec.title)
    return _finish(fig, spec)


def _sphere_grid(table: Table):
    table.require("theta", "phi", "husimi")
    thetas = np.unique(table.numeric("theta"))
    phis = np.unique(table.numeric("phi"))
    values = np.full((len(thetas), len(phis)), np.nan)
    ti = np.searchsorted(thetas, table.numeric("theta"))
    pi_ = np.searchsorted(phis, table.numeric("phi"))
    values[ti, pi_] = table.numeric("husimi")
    if np.any(np.isnan(values)):
        raise PlotkitError("sphere table does not form a complete grid")
    return thetas, phis, values


def _render_sphere(table: Table, spec: PanelSpec):
    thetas, phis, values = _sphere_grid(table)
    T, P = np.meshgrid(thetas, phis, indexing="ij")
    X = np.sin(T) * np.cos(P)
    Y = np.sin(T) * np.sin(P)
    Z = np.cos(T)
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
    vmax = float(values.max()) or 1.0
    # orthographic views: onto the z-y plane (seen from +x) and the
    # z-x plane (seen from +y); only the facing hemisphere is shown
    for ax, (u, v, mask, xlab) in zip(axes[:2], (
            (Y, Z, X >= 0, "y"), (X, Z, Y >= 0, "x"))):
        sc = ax.scatter(u[mask], v[mask], c=values[mask], s=4, vmin=0.0,
                        vmax=vmax, cmap="viridis", rasterized=True)
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_aspect("equal")
        ax.set_xlabel(xlab)
        ax.set_ylabel("z")
    m = axes[2].pcolormesh(phis, thetas, values, shading="nearest",
                           cmap="viridis", vmin=0.0, vmax=vmax)
    axes[2].invert_yaxis()
    axes[2].set_xlabel("phi")
    axes[2].set_ylabel("theta")
    fig.colorbar(m, ax=axes[2], label="husimi")
    fig.suptitle(spec.title)
    return _finish(fig, spec)


def _render_scaling(table: Table, spec: PanelSpec):
    x_name = table.columns[0]
    x = table.numeric(x_name)
    y_names = list(table.columns[1:])
    if not y_names:
        raise MissingColumnError("scaling table needs value columns")
    fig, axes = plt.subplots(1, len(y_names),
                             figsize=(3.2 * len(y_names), 3.0))
    axes = np.atleast_1d(axes)
    for ax, name in zip(axes, y_names):
        ax.plot(x, table.numeric(name), "o-")
        ax.set_xlabel(x_name)
        ax.set_ylabel(name)
    fig.suptitle(spec.title)
    return _finish(fig, spec)


def _render_summary(table: Table, spec: PanelSpec):
    cols = list(table.columns)
    if len(cols) < 3:
        raise MissingColumnError("summary table needs (label, x, y) columns")
    label_name, x_name, y_name = cols[0], cols[1], cols[2]
    labels = table.data[label_name]
    x = table.numeric(x_name)
    y = table.numeric(y_name)
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for lab in sorted(set(labels.tolist())):
        sel = labels == lab
        order = np.argsort(x[sel])
        ax.plot(x[sel][order], y[sel][order], "o-", label=str(lab))
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    ax.legend(frameon=False, fontsize=8)
    ax.set_title(spec.title)
    return _finish(fig, spec)


def _render_bloch(table: Table, spec: PanelSpec):
    table.require("t", "r_x", "r_y", "r_z")
    t = table.numeric("t")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for name in ("r_x", "r_y", "r_z"):
        ax.plot(t, table.numeric(name), label=name)
    norm = np.sqrt(sum(table.numeric(n) ** 2 for n in ("r_x", "r_y", "r_z")))
    ax.plot(t, norm, "k--", lw=1, label="|r|")
    ax.set_xlabel("t")
    ax.set_ylabel("Bloch components")
    ax.set_ylim(-1.05, 1.05)
    ax.legend(frameon=False, fontsize=8)
    ax.set_title(spec.title)
    return _finish(fig, spec)


def _render_heatmap(table: Table, spec: PanelSpec):
    table.require("row", "col", "real", "imag")
    rows = table.numeric("row").astype(int)
    cols = table.numeric("col").astype(int)
    dim = rows.max() + 1
    fig, axes = plt.subplots(1, 2, figsize=(7.2, 3.2))
    for ax, part in zip(axes, ("real", "imag")):
        mat = np.zeros((dim, cols.max() + 1))
        mat[rows, cols] = table.numeric(part)
        vmax = max(abs(mat).max(), 1e-12)
        im = ax.imshow(mat, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        ax.set_title(part)
        ax.set_xlabel("col")
        ax.set_ylabel("row")
        fig.colorbar(im, ax=ax, shrink=0.8)
    fig.suptitle(spec.title)
    return _finish(fig, spec)


_RENDERERS = {
    "curve": _render_curve,
    "multi_curve": _render_multi_curve,
    "sphere": _render_sphere,
    "scaling": _render_scaling,
    "summary": _render_summary,
    "bloch": _render_bloch,
    "heatmap": _render_heatmap,
}


def render(spec: PanelSpec) -> str:
    """Render one panel; returns the output image path."""
    table = load_table(spec.csv_path)
    return _RENDERERS[spec.kind](table, spec)


def render_all(manifest_path: str, out_dir: str) -> list:
    """Render every table referenced by a run manifest.

    Returns the list of written image paths, one per CSV.
    """
    if not os.path.exists(manifest_path):
        raise PlotkitError(f"manifest not found: {manifest_path}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    base = os.path.dirname(os.path.abspath(manifest_path))
    written = []
    for entry in manifest["tables"]:
        meta = dict(entry.get("meta", {}))
        spec = PanelSpec(
            csv_path=os.path.join(base, entry["path"]),
            kind=entry["kind"],
            out_path=os.path.join(out_dir, entry["name"] + ".png"),
            title=entry["name"],
            meta=meta,
        )
        written.append(render(spec))
    return written
