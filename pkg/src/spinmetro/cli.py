"""Command-line runner for scenario configs.

Verbs:
  run            execute a config and write CSV tables plus a manifest
  validate       schema/physics diagnostics without running
  list-scenarios catalog of the bundled per-figure configs

Exit codes: 0 success, 2 config error (parse/schema/caps, or nonempty
validate diagnostics), 3 numerical failure (NaN/Inf results, solver
breakdown).  The default output directory is --out, else the environment
variable SPINMETRO_OUT, else ./runs; each run writes into <out>/<stem>/.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from numpy.linalg import LinAlgError

from . import __version__
from .liouville import IntegratorError, RepresentationError
from .metrology import EndpointMaximumError
from .scenarios import ConfigError, normalize_config, run_scenario, \
    validate_config
from .tables import NumericalFailure, config_hash, write_manifest, \
    write_tables

_OUT_ENV = "SPINMETRO_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def bundled_config_names() -> list:
    root = resources.files("spinmetro") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir()
                  if p.name.endswith(".json"))


def load_bundled_config(name: str) -> dict:
    path = resources.files("spinmetro") / "configs" / f"{name}.json"
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_config(ref: str) -> dict:
    """Load from a path, or fall back to a bundled config name."""
    if os.path.exists(ref):
        try:
            with open(ref, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ref!r}: {exc}") from exc
    if ref in bundled_config_names():
        return load_bundled_config(ref)
    raise ConfigError(f"config {ref!r}: no such file or bundled name")


def _parse_override(text: str):
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key.path=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw                # bare strings allowed
    return key.strip(), value


def apply_override(cfg: dict, dotted: str, value) -> None:
    """Set a dotted path; integer segments index into lists."""
    parts = dotted.split(".")
    node = cfg
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            try:
                idx = int(part)
                current = node[idx]
            except (ValueError, IndexError) as exc:
                raise ConfigError(
                    f"override {dotted!r}: bad list index {part!r}") from exc
            if last:
                node[idx] = value
            else:
                node = current
        elif isinstance(node, dict):
            if last:
                node[part] = value
            else:
                node = node.setdefault(part, {})
        else:
            raise ConfigError(
                f"override {dotted!r}: {part!r} is not reachable")


def _resolve_out(args) -> str:
    return args.out or os.environ.get(_OUT_ENV) or "runs"


def _prepared_config(args) -> dict:
    cfg = _load_config(args.config)
    for text in args.override or []:
        key, value = _parse_override(text)
        apply_override(cfg, key, value)
    return cfg


def cmd_run(args) -> int:
    cfg = _prepared_config(args)
    norm = normalize_config(cfg)
    tables = run_scenario(norm, threads=args.threads)
    provenance = {
        "engine_version": __version__,
        "scenario": norm["scenario"],
        "config_hash": config_hash(norm),
    }
    out_dir = os.path.join(_resolve_out(args), norm["output"]["stem"])
    entries = write_tables(tables, out_dir, provenance)
    manifest = write_manifest(out_dir, provenance, norm, entries)
    print(f"wrote {len(entries)} table(s) and {manifest}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _prepared_config(args)
    diagnostics = validate_config(cfg)
    if not diagnostics:
        print("ok")
        return EXIT_OK
    for line in diagnostics:
        print(f"error: {line}")
    return EXIT_CONFIG


def cmd_list_scenarios(args) -> int:
    for name in bundled_config_names():
        cfg = load_bundled_config(name)
        desc = cfg.get("description", "")
        print(f"{name:8s} [{cfg.get('scenario', '?')}] {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmetro",
        description="Collective-spin metrology scenario runner.")
    parser.add_argument("--version", action="version",
                        version=f"spinmetro {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_config_flags(p):
        p.add_argument("--config", required=True,
                       help="config path or bundled name (see list-scenarios)")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="dotted-path config override (JSON-typed value)")

    p_run = sub.add_parser("run", help="execute a scenario config")
    add_config_flags(p_run)
    p_run.add_argument("--out", help=f"output directory (default ${_OUT_ENV}"
                                     " or ./runs)")
    p_run.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent sweep points")
    p_run.set_defaults(handler=cmd_run)

    p_val = sub.add_parser("validate", help="check a config without running")
    add_config_flags(p_val)
    p_val.set_defaults(handler=cmd_validate)

    p_ls = sub.add_parser("list-scenarios", help="show bundled configs")
    p_ls.set_defaults(handler=cmd_list_scenarios)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, IntegratorError, EndpointMaximumError,
            RepresentationError, FloatingPointError, LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
