"""Result tables and their deterministic on-disk form.

A scenario produces a list of ResultTable objects; this module turns them
into CSV files plus a JSON manifest.  Conventions chosen for bit-exact
regression fixtures:

- UTF-8, LF line endings, '.' decimal separator;
- floats printed with 17 significant digits (round-trip exact for double);
- rows sorted by their full value tuple before writing, so concurrent
  production order never changes output bytes;
- a '#'-prefixed provenance header (engine version, config hash, scenario);
- write-to-temp plus atomic rename, and any NaN/Inf aborts before a file
  appears (fail-closed).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

__all__ = [
    "NumericalFailure",
    "ResultTable",
    "config_hash",
    "format_value",
    "write_manifest",
    "write_tables",
]


class NumericalFailure(RuntimeError):
    """A result table contains NaN/Inf, or the solver reported failure."""


@dataclass
class ResultTable:
    """Named columnar result with per-table metadata for the manifest."""

    name: str                      # file stem, unique within a run
    columns: list                  # column names, fixed order
    rows: list                     # list of tuples/lists matching columns
    kind: str = "curve"            # panel hint: curve, sphere, heatmap, ...
    meta: dict = field(default_factory=dict)

    def check_finite(self) -> None:
        for row in self.rows:
            for col, value in zip(self.columns, row):
                if isinstance(value, float) and not math.isfinite(value):
                    raise NumericalFailure(
                        f"table {self.name!r}: non-finite value in "
                        f"column {col!r}")


def format_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def config_hash(normalized_config: dict) -> str:
    blob = json.dumps(normalized_config, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
    return "sha256:" + hashlib.sha256(blob).hexdigest()


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sort_key(row):
    key = []
    for v in row:
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            key.append((0, float(v), ""))
        else:
            key.append((1, 0.0, str(v)))
    return tuple(key)


def render_csv(table: ResultTable, header_lines) -> str:
    lines = [f"# {line}" for line in header_lines]
    lines.append(",".join(str(c) for c in table.columns))
    rows = sorted(table.rows, key=_sort_key)
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_tables(tables, out_dir: str, provenance: dict) -> list:
    """Write every table; all-or-nothing on numerical failure.

    Returns the per-table manifest entries.  Finiteness is checked for all
    tables before the first byte is written.
    """
    for t in tables:
        t.check_finite()
    names = [t.name for t in tables]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate table names: {names}")
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for t in tables:
        header = [f"spinmetro {provenance['engine_version']}",
                  f"scenario: {provenance['scenario']}",
                  f"config-hash: {provenance['config_hash']}",
                  f"table: {t.name} (kind: {t.kind})"]
        for key in sorted(t.meta):
            header.append(f"{key}: {t.meta[key]}")
        header.append("columns: " + ",".join(str(c) for c in t.columns))
        path = os.path.join(out_dir, t.name + ".csv")
        _atomic_write(path, render_csv(t, header))
        entries.append({
            "name": t.name,
            "path": t.name + ".csv",
            "kind": t.kind,
            "columns": list(t.columns),
            "meta": dict(t.meta),
        })
    return entries


def write_manifest(out_dir: str, provenance: dict, config: dict,
                   entries: list) -> str:
    manifest = {
        "engine_version": provenance["engine_version"],
        "scenario": provenance["scenario"],
        "config_hash": provenance["config_hash"],
        "config": config,
        "tables": entries,
    }
    path = os.path.join(out_dir, "manifest.json")
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
