"""Scenario configs: schema validation, normalization and execution.

A scenario config is a JSON document.  Validation is strict: unknown keys
are rejected, every scenario kind checks its required fields before any
computation, and physics caps (local noise only up to BLOCK_N_CAP spins)
are enforced up front.  Running a validated config produces a list of
ResultTable objects; serialization lives in tables.py.
"""

from __future__ import annotations

import copy
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import engine, metrology, prep
from .block_rep import BLOCK_N_CAP
from .liouville import HamiltonianSpec, NoiseChannel
from .phase_space import bloch_vector, husimi
from .spin_core import SymmetricState, coherent_amplitudes, ghz_axis, multi_ghz
from .tables import ResultTable

__all__ = [
    "ConfigError",
    "SCENARIO_KINDS",
    "normalize_config",
    "run_scenario",
    "validate_config",
]


class ConfigError(ValueError):
    """Config does not satisfy the schema or a physics precondition."""


SCENARIO_KINDS = (
    "husimi_oat", "husimi_tat", "qfi_curve", "gain_curve", "n_scan",
    "control_sweep", "qcrb_curve", "qcrb_control", "bloch_single",
    "matrix_movie",
)

_CHANNEL_SCOPES = ("local", "collective")
_CHANNEL_KINDS = ("emission", "pumping", "dephasing")
_KNOWN_TAGS = ("J_x", "J_y", "J_z", "J_x^2", "J_x^2-J_y^2", "J_x^2+J_z^2")
_PROBES = ("coherent_x", "coherent_minus_z", "ghz_x", "ghz_y", "ghz_z",
           "multi_ghz")
_CONTROL_KINDS = tuple(engine.CONTROL_TAGS)

# keys accepted for every scenario kind
_COMMON_KEYS = {"scenario", "description", "n_spins", "output", "provenance",
                "tolerances"}
_KIND_KEYS = {
    "husimi_oat": {"snapshots", "grid"},
    "husimi_tat": {"snapshots", "grid", "append_multi_ghz", "search_grid"},
    "qfi_curve": {"probe", "variants", "hamiltonian", "nominal", "time_grid"},
    "gain_curve": {"probe", "variants", "hamiltonian", "nominal", "time_grid"},
    "n_scan": {"probe", "variants", "nominal", "time_grid", "n_values"},
    "control_sweep": {"probe", "variants", "nominal", "time_grid", "control",
                      "horizon", "emit"},
    "qcrb_curve": {"probe", "panels", "nominal", "time_grid", "repetitions"},
    "qcrb_control": {"probe", "variants", "nominal", "time_grid", "control",
                     "repetitions"},
    "bloch_single": {"probe", "variants", "nominal", "time_grid"},
    "matrix_movie": {"probe", "variants", "nominal", "snapshots"},
}
_KIND_REQUIRED = {
    "husimi_oat": {"snapshots"},
    "husimi_tat": {"snapshots"},
    "qfi_curve": {"variants", "time_grid"},
    "gain_curve": {"variants", "time_grid"},
    "n_scan": {"variants", "time_grid", "n_values"},
    "control_sweep": {"variants", "time_grid", "control"},
    "qcrb_curve": {"panels", "time_grid"},
    "qcrb_control": {"variants", "time_grid", "control"},
    "bloch_single": {"variants", "time_grid"},
    "matrix_movie": {"variants", "snapshots"},
}


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _safe_label(s) -> bool:
    return (isinstance(s, str) and s != ""
            and all(c.isascii() and (c.isalnum() or c in "_-") for c in s))


def _check_channels(channels, n_spins, where, bad):
    if not isinstance(channels, list):
        bad.append(f"{where}: channels must be a list")
        return
    for i, ch in enumerate(channels):
        here = f"{where}.channels[{i}]"
        if not isinstance(ch, dict) or set(ch) != {"scope", "kind", "rate"}:
            bad.append(f"{here}: expected exactly scope/kind/rate")
            continue
        if ch["scope"] not in _CHANNEL_SCOPES:
            bad.append(f"{here}: scope must be one of {_CHANNEL_SCOPES}")
        if ch["kind"] not in _CHANNEL_KINDS:
            bad.append(f"{here}: kind must be one of {_CHANNEL_KINDS}")
        if not _is_num(ch.get("rate")) or ch["rate"] < 0:
            bad.append(f"{here}: rate must be a number >= 0")
        if (ch.get("scope") == "local" and isinstance(n_spins, int)
                and n_spins > BLOCK_N_CAP):
            bad.append(f"{here}: local noise capped at N={BLOCK_N_CAP} "
                       f"(got N={n_spins})")


def _check_variants(variants, n_spins, bad, key="variants"):
    if not isinstance(variants, list) or not variants:
        bad.append(f"{key} must be a nonempty list")
        return
    labels = []
    for i, v in enumerate(variants):
        where = f"{key}[{i}]"
        if not isinstance(v, dict) or set(v) != {"label", "channels"}:
            bad.append(f"{where}: expected exactly label/channels")
            continue
        if not _safe_label(v["label"]):
            bad.append(f"{where}: label must be filename-safe and nonempty")
        labels.append(v["label"])
        _check_channels(v["channels"], n_spins, where, bad)
    if len(set(labels)) != len(labels):
        bad.append(f"{key}: duplicate labels {labels}")


def _check_time_grid(grid, bad, key="time_grid", positive=False):
    pts = _grid_points_or_none(grid)
    if pts is None:
        bad.append(f"{key}: expected {{start,stop,num}} or {{points}}")
        return
    if len(pts) < 2 or np.any(np.diff(pts) <= 0):
        bad.append(f"{key}: points must be strictly increasing (>= 2 points)")
    if np.any(pts < 0):
        bad.append(f"{key}: times must be >= 0")
    if positive and pts.size and pts[0] <= 0:
        bad.append(f"{key}: this scenario divides by t; times must be > 0")


def _grid_points_or_none(grid):
    if not isinstance(grid, dict):
        return None
    if set(grid) == {"start", "stop", "num"}:
        if not (_is_num(grid["start"]) and _is_num(grid["stop"])
                and isinstance(grid["num"], int) and grid["num"] >= 2):
            return None
        return np.linspace(grid["start"], grid["stop"], grid["num"])
    if set(grid) == {"points"}:
        pts = grid["points"]
        if not isinstance(pts, list) or not all(_is_num(p) for p in pts):
            return None
        return np.asarray(pts, dtype=float)
    return None


def _check_control(ctrl, bad, multi_kind: bool):
    if not isinstance(ctrl, dict):
        bad.append("control must be an object")
        return
    want = {"kinds", "chi_values"} if multi_kind else {"kind", "chi_values"}
    if set(ctrl) != want:
        bad.append(f"control: expected exactly keys {sorted(want)}")
        return
    kinds = ctrl["kinds"] if multi_kind else [ctrl["kind"]]
    if not isinstance(kinds, list) or not kinds or \
            any(k not in _CONTROL_KINDS for k in kinds):
        bad.append(f"control: kind(s) must be from {_CONTROL_KINDS}")
    chis = ctrl["chi_values"]
    if not isinstance(chis, list) or not chis or \
            not all(_is_num(c) and c >= 0 for c in chis):
        bad.append("control.chi_values must be a nonempty list of numbers >= 0")
    elif len(set(chis)) != len(chis):
        bad.append("control.chi_values must be distinct")


def _check_hamiltonian(ham, bad):
    if not isinstance(ham, dict) or set(ham) - {"static_terms", "parameters"}:
        bad.append("hamiltonian: expected keys static_terms/parameters")
        return
    for term in ham.get("static_terms", []):
        if not (isinstance(term, list) and len(term) == 2
                and _is_num(term[0]) and term[1] in _KNOWN_TAGS):
            bad.append(f"hamiltonian.static_terms: bad term {term!r}")
    params = ham.get("parameters", [])
    if not isinstance(params, list) or not params:
        bad.append("hamiltonian.parameters must be a nonempty list")
        return
    for p in params:
        if not (isinstance(p, list) and len(p) == 2
                and _safe_label(p[0]) and p[1] in _KNOWN_TAGS):
            bad.append(f"hamiltonian.parameters: bad entry {p!r}")


def validate_config(cfg) -> list:
    """Schema and physics checks without running; returns diagnostics."""
    bad = []
    if not isinstance(cfg, dict):
        return ["config must be a JSON object"]
    kind = cfg.get("scenario")
    if kind not in SCENARIO_KINDS:
        return [f"scenario must be one of {SCENARIO_KINDS} (got {kind!r})"]
    allowed = _COMMON_KEYS | _KIND_KEYS[kind]
    unknown = set(cfg) - allowed
    if unknown:
        bad.append(f"unknown keys for {kind}: {sorted(unknown)}")
    missing = {"n_spins"} | _KIND_REQUIRED[kind]
    missing -= set(cfg)
    if missing:
        bad.append(f"missing required keys: {sorted(missing)}")

    n = cfg.get("n_spins")
    if not isinstance(n, int) or n < 1:
        bad.append("n_spins must be an integer >= 1")
        n = None
    elif kind == "bloch_single" and n != 1:
        bad.append("bloch_single requires n_spins = 1")
    elif kind != "bloch_single" and n is not None and n < 2:
        bad.append(f"{kind} requires n_spins >= 2")

    if "probe" in cfg and cfg["probe"] not in _PROBES:
        bad.append(f"probe must be one of {_PROBES}")
    if "output" in cfg:
        out = cfg["output"]
        if not isinstance(out, dict) or set(out) != {"stem"} or \
                not _safe_label(out["stem"]):
            bad.append("output must be {stem: filename-safe string}")
    if "description" in cfg and not isinstance(cfg["description"], str):
        bad.append("description must be a string")
    if "provenance" in cfg and not (
            isinstance(cfg["provenance"], list)
            and all(isinstance(s, str) for s in cfg["provenance"])):
        bad.append("provenance must be a list of strings")
    if "tolerances" in cfg:
        tol = cfg["tolerances"]
        if not isinstance(tol, dict) or set(tol) - {"eigen_cutoff"} or \
                ("eigen_cutoff" in tol and not (
                    _is_num(tol["eigen_cutoff"]) and tol["eigen_cutoff"] > 0)):
            bad.append("tolerances: only eigen_cutoff (number > 0) is allowed")
    if "nominal" in cfg:
        nom = cfg["nominal"]
        if not isinstance(nom, dict) or not all(
                _safe_label(k) and _is_num(v) for k, v in nom.items()):
            bad.append("nominal must map parameter names to numbers")
    if "repetitions" in cfg and not (
            isinstance(cfg["repetitions"], int) and cfg["repetitions"] >= 1):
        bad.append("repetitions must be an integer >= 1")
    if "hamiltonian" in cfg:
        _check_hamiltonian(cfg["hamiltonian"], bad)

    if "variants" in cfg and "variants" in _KIND_KEYS[kind]:
        _check_variants(cfg["variants"], n, bad)
    if kind == "qcrb_curve" and isinstance(cfg.get("panels"), list) \
            and cfg["panels"]:
        labels = []
        for i, panel in enumerate(cfg["panels"]):
            where = f"panels[{i}]"
            if not isinstance(panel, dict) or \
                    set(panel) != {"label", "curves"}:
                bad.append(f"{where}: expected exactly label/curves")
                continue
            if not _safe_label(panel["label"]):
                bad.append(f"{where}: label must be filename-safe")
            labels.append(panel["label"])
            _check_variants(panel["curves"], n, bad, key=f"{where}.curves")
        if len(set(labels)) != len(labels):
            bad.append("panels: duplicate labels")
    elif kind == "qcrb_curve" and "panels" in cfg:
        bad.append("panels must be a nonempty list")

    if "time_grid" in cfg:
        positive = kind in ("qfi_curve", "gain_curve", "n_scan",
                            "control_sweep", "qcrb_curve", "qcrb_control")
        _check_time_grid(cfg["time_grid"], bad, positive=positive)
    if "snapshots" in cfg:
        snaps = cfg["snapshots"]
        if not isinstance(snaps, list) or not snaps or \
                not all(_is_num(s) and s >= 0 for s in snaps):
            bad.append("snapshots must be a nonempty list of times >= 0")
    if "grid" in cfg:
        g = cfg["grid"]
        ok = (isinstance(g, dict) and set(g) == {"n_theta", "n_phi"}
              and isinstance(g.get("n_theta"), int) and g["n_theta"] >= 5
              and g["n_theta"] % 2 == 1
              and isinstance(g.get("n_phi"), int) and g["n_phi"] >= 8)
        if not ok:
            bad.append("grid must be {n_theta: odd int >= 5, n_phi: int >= 8}")
    if "search_grid" in cfg:
        _check_time_grid(cfg["search_grid"], bad, key="search_grid")
    if "append_multi_ghz" in cfg:
        if not isinstance(cfg["append_multi_ghz"], bool):
            bad.append("append_multi_ghz must be a boolean")
        elif cfg["append_multi_ghz"] and "search_grid" not in cfg:
            bad.append("append_multi_ghz requires a search_grid")
    if "control" in cfg:
        _check_control(cfg["control"], bad, multi_kind=(kind == "control_sweep"))
    if "horizon" in cfg and not (_is_num(cfg["horizon"]) and cfg["horizon"] > 0):
        bad.append("horizon must be a number > 0")
    if "emit" in cfg:
        e = cfg["emit"]
        if not isinstance(e, list) or not e or \
                set(e) - {"integrated", "curves"}:
            bad.append("emit must be a nonempty subset of"
                       " ['integrated', 'curves']")
    if "n_values" in cfg:
        nv = cfg["n_values"]
        if not isinstance(nv, list) or not nv or \
                not all(isinstance(x, int) and x >= 2 for x in nv) or \
                len(set(nv)) != len(nv):
            bad.append("n_values must be distinct integers >= 2")
        elif "variants" in cfg and isinstance(cfg["variants"], list):
            local = any(isinstance(v, dict)
                        and any(isinstance(ch, dict)
                                and ch.get("scope") == "local"
                                for ch in v.get("channels", []))
                        for v in cfg["variants"])
            if local and max(nv) > BLOCK_N_CAP:
                bad.append(f"n_values with local noise capped at "
                           f"N={BLOCK_N_CAP}")
    return bad


_DEFAULTS = {
    "husimi_oat": {"grid": {"n_theta": 81, "n_phi": 161}},
    "husimi_tat": {"grid": {"n_theta": 81, "n_phi": 161},
                   "append_multi_ghz": False},
    "qfi_curve": {"probe": "ghz_z", "nominal": {"phi": 0.0}},
    "gain_curve": {"probe": "ghz_z", "nominal": {"phi": 0.0}},
    "n_scan": {"probe": "ghz_z", "nominal": {"phi": 0.0}},
    "control_sweep": {"probe": "ghz_z", "nominal": {"phi": 0.0},
                      "horizon": 50.0, "emit": ["integrated", "curves"]},
    "qcrb_curve": {"probe": "multi_ghz", "repetitions": 1,
                   "nominal": {"phi_x": 0.1, "phi_y": 0.1, "phi_z": 0.1}},
    "qcrb_control": {"probe": "multi_ghz", "repetitions": 1,
                     "nominal": {"phi_x": 0.1, "phi_y": 0.1, "phi_z": 0.1}},
    "bloch_single": {"probe": "coherent_x", "nominal": {"phi": 0.0}},
    "matrix_movie": {"probe": "ghz_z", "nominal": {"phi": 0.0}},
}


def normalize_config(cfg: dict) -> dict:
    """Validated config with defaults filled in; raises ConfigError."""
    bad = validate_config(cfg)
    if bad:
        raise ConfigError("; ".join(bad))
    out = copy.deepcopy(cfg)
    kind = out["scenario"]
    for key, value in _DEFAULTS[kind].items():
        out.setdefault(key, copy.deepcopy(value))
    out.setdefault("output", {"stem": kind})
    out.setdefault("tolerances", {})
    out["tolerances"].setdefault("eigen_cutoff",
                                 metrology.DEFAULT_EIGEN_CUTOFF)
    if kind in ("qfi_curve", "gain_curve"):
        out.setdefault("hamiltonian", _spec_dict(engine.single_parameter_spec()))
    # nominal names must name declared parameters
    names = _param_names(out)
    extra = set(out.get("nominal", {})) - set(names)
    if extra:
        raise ConfigError(f"nominal names {sorted(extra)} are not "
                          f"parameters {names}")
    return out


def _spec_dict(spec: HamiltonianSpec) -> dict:
    return {"static_terms": [[c, t] for c, t in spec.static_terms],
            "parameters": [[n, t] for n, t in spec.parameters]}


def _param_names(cfg: dict) -> list:
    kind = cfg["scenario"]
    if kind in ("qcrb_curve", "qcrb_control"):
        return ["phi_x", "phi_y", "phi_z"]
    if "hamiltonian" in cfg:
        return [n for n, _ in cfg["hamiltonian"]["parameters"]]
    return ["phi"]


# ---------------------------------------------------------------------------
# execution helpers
# ---------------------------------------------------------------------------

def _probe_state(name: str, n: int) -> SymmetricState:
    if name == "coherent_x":
        return SymmetricState(n, coherent_amplitudes(n / 2.0, np.pi / 2, 0.0))
    if name == "coherent_minus_z":
        return SymmetricState(n, coherent_amplitudes(n / 2.0, np.pi, 0.0))
    if name == "multi_ghz":
        return multi_ghz(n)
    if name.startswith("ghz_"):
        return ghz_axis(n, name[-1])
    raise ConfigError(f"unknown probe {name!r}")


def _channels(entries) -> tuple:
    return tuple(NoiseChannel(ch["scope"], ch["kind"], float(ch["rate"]))
                 for ch in entries)


def _grid_points(grid) -> np.ndarray:
    pts = _grid_points_or_none(grid)
    assert pts is not None
    return pts


def _ham_spec(cfg: dict, static_extra=()) -> HamiltonianSpec:
    if cfg["scenario"] in ("qcrb_curve", "qcrb_control"):
        return engine.three_parameter_spec(static_terms=static_extra)
    ham = cfg.get("hamiltonian")
    if ham is None:
        return engine.single_parameter_spec(static_terms=static_extra)
    return HamiltonianSpec(
        static_terms=tuple(static_extra)
        + tuple((float(c), t) for c, t in ham["static_terms"]),
        parameters=tuple((n, t) for n, t in ham["parameters"]))


def _map(work, threads: int):
    """Deterministic-order map, optionally with a thread pool."""
    if threads <= 1 or len(work) <= 1:
        return [fn() for fn in work]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn) for fn in work]
        return [f.result() for f in futures]


def _stem(cfg: dict) -> str:
    return cfg["output"]["stem"]


def _sphere_table(name: str, state, cfg: dict, meta: dict) -> ResultTable:
    g = cfg["grid"]
    grid = husimi(state, n_theta=g["n_theta"], n_phi=g["n_phi"])
    rows = []
    for it, theta in enumerate(grid.thetas):
        for ip, phi in enumerate(grid.phis):
            rows.append((float(theta), float(phi), float(grid.values[it, ip])))
    return ResultTable(name=name, columns=["theta", "phi", "husimi"],
                       rows=rows, kind="sphere", meta=meta)


# ---------------------------------------------------------------------------
# scenario implementations
# ---------------------------------------------------------------------------

def _run_husimi_oat(cfg, threads):
    n = cfg["n_spins"]
    tables = []
    for k, chi_t in enumerate(cfg["snapshots"]):
        state = prep.oat_evolve(n, float(chi_t))
        tables.append(_sphere_table(
            f"{_stem(cfg)}_s{k}", state, cfg,
            {"chi_t": format(float(chi_t), ".17g"), "dynamics": "oat"}))
    return tables


def _run_husimi_tat(cfg, threads):
    n = cfg["n_spins"]
    start = ghz_axis(n, "z")
    snaps = [float(s) for s in cfg["snapshots"]]
    tables = []
    extra = []
    if cfg["append_multi_ghz"]:
        search = _grid_points(cfg["search_grid"])
        chi_star, fid_star, _ = prep.find_multi_ghz_time(n, search)
        snaps.append(chi_star)
        fid_rows = [(float(ct), prep.multi_ghz_fidelity(
            prep.tat_evolve(start, "TAT_minus", float(ct)))[0])
            for ct in search]
        extra.append(ResultTable(
            name=f"{_stem(cfg)}_fidelity",
            columns=["chi_t", "fidelity"], rows=fid_rows, kind="curve",
            meta={"chi_t_star": format(chi_star, ".17g"),
                  "fidelity_star": format(fid_star, ".17g"),
                  "target": "multi_ghz"}))
    for k, chi_t in enumerate(snaps):
        state = prep.tat_evolve(start, "TAT_minus", chi_t)
        tables.append(_sphere_table(
            f"{_stem(cfg)}_s{k}", state, cfg,
            {"chi_t": format(chi_t, ".17g"), "dynamics": "tat"}))
    return tables + extra


def _qfi_values(cfg, channels, times, static_extra=()):
    probe = _probe_state(cfg["probe"], cfg["n_spins"])
    spec = _ham_spec(cfg, static_extra)
    system = engine.ReducedSystem(probe, spec, channels, cfg["nominal"])
    cutoff = cfg["tolerances"]["eigen_cutoff"]
    param = _param_names(cfg)[0]
    return np.array([b.qfi(param, eigen_cutoff=cutoff)
                     for b in system.bundles(times)])


def _run_qfi_curve(cfg, threads, gain_only=False):
    times = _grid_points(cfg["time_grid"])

    def job(variant):
        def run():
            q = _qfi_values(cfg, _channels(variant["channels"]), times)
            g = q / times ** 2
            if gain_only:
                rows = [(float(t), float(gv)) for t, gv in zip(times, g)]
                cols = ["t", "gain"]
            else:
                rows = [(float(t), float(qv), float(gv))
                        for t, qv, gv in zip(times, q, g)]
                cols = ["t", "qfi", "gain"]
            return ResultTable(
                name=f"{_stem(cfg)}_{variant['label']}", columns=cols,
                rows=rows, kind="curve", meta={"variant": variant["label"]})
        return run

    return _map([job(v) for v in cfg["variants"]], threads)


def _run_gain_curve(cfg, threads):
    return _run_qfi_curve(cfg, threads, gain_only=True)


def _run_n_scan(cfg, threads):
    times = _grid_points(cfg["time_grid"])
    spec = _ham_spec(cfg)

    def job(variant):
        def run():
            rows = []
            for n in cfg["n_values"]:
                probe = _probe_state(cfg["probe"], n)
                res = engine.scan_optimal_time(
                    probe, spec, _channels(variant["channels"]), times,
                    nominal=cfg["nominal"], channel_tag=variant["label"])
                rows.append((int(n), float(res.q_max), float(res.t_opt),
                             float(res.g_max)))
            return ResultTable(
                name=f"{_stem(cfg)}_{variant['label']}",
                columns=["n", "q_max", "t_opt", "g_max"], rows=rows,
                kind="scaling", meta={"variant": variant["label"]})
        return run

    return _map([job(v) for v in cfg["variants"]], threads)


def _run_control_sweep(cfg, threads):
    times = _grid_points(cfg["time_grid"])
    chis = [float(c) for c in cfg["control"]["chi_values"]]
    horizon = float(cfg["horizon"])

    def job(variant, ckind):
        def run():
            channels = _channels(variant["channels"])
            out = []
            curve_rows, integ_rows = [], []
            for chi in chis:
                terms = engine.control_terms(ckind, chi)
                q = _qfi_values(cfg, channels, times, static_extra=terms)
                curve_rows.extend((chi, float(t), float(qv))
                                  for t, qv in zip(times, q))
                gain = metrology.gain_curve(
                    metrology.QfiCurve(times=times, values=q))
                integ_rows.append(
                    (chi, float(metrology.integrated_gain(gain, T=horizon))))
            base = f"{_stem(cfg)}_{variant['label']}_{ckind}"
            meta = {"variant": variant["label"], "control": ckind}
            if "curves" in cfg["emit"]:
                out.append(ResultTable(
                    name=f"{base}_curves", columns=["chi", "t", "qfi"],
                    rows=curve_rows, kind="multi_curve", meta=meta))
            if "integrated" in cfg["emit"]:
                out.append(ResultTable(
                    name=f"{base}_integrated",
                    columns=["chi", "integrated_gain"], rows=integ_rows,
                    kind="curve",
                    meta=dict(meta, horizon=format(horizon, ".17g"))))
            return out
        return run

    work = [job(v, k) for v in cfg["variants"] for k in cfg["control"]["kinds"]]
    return [t for group in _map(work, threads) for t in group]


def _qcrb_values(cfg, channels, times, static_extra=()):
    probe = _probe_state(cfg["probe"], cfg["n_spins"])
    spec = _ham_spec(cfg, static_extra)
    system = engine.ReducedSystem(probe, spec, channels, cfg["nominal"])
    cutoff = cfg["tolerances"]["eigen_cutoff"]
    names = _param_names(cfg)
    reps = cfg["repetitions"]
    values = []
    for b in system.bundles(times):
        Q = b.qfim(names, eigen_cutoff=cutoff)
        wb = metrology.weighted_qcrb(Q, repetitions=reps)
        values.append(wb.value)
    return np.array(values)


def _run_qcrb_curve(cfg, threads):
    times = _grid_points(cfg["time_grid"])

    def job(panel):
        def run():
            columns = ["t"]
            data = [times.astype(float)]
            for curve in panel["curves"]:
                columns.append(curve["label"])
                data.append(_qcrb_values(cfg, _channels(curve["channels"]),
                                         times))
            rows = [tuple(float(col[i]) for col in data)
                    for i in range(len(times))]
            return ResultTable(
                name=f"{_stem(cfg)}_{panel['label']}", columns=columns,
                rows=rows, kind="multi_curve",
                meta={"panel": panel["label"],
                      "quantity": "weighted_qcrb_trace"})
        return run

    return _map([job(p) for p in cfg["panels"]], threads)


def _run_qcrb_control(cfg, threads):
    times = _grid_points(cfg["time_grid"])
    ckind = cfg["control"]["kind"]
    chis = [float(c) for c in cfg["control"]["chi_values"]]

    def job(variant):
        def run():
            channels = _channels(variant["channels"])
            columns = ["t"]
            data = [times.astype(float)]
            summary = []
            for chi in chis:
                terms = engine.control_terms(ckind, chi)
                vals = _qcrb_values(cfg, channels, times, static_extra=terms)
                columns.append(f"chi={chi:g}")
                data.append(vals)
                k = int(np.argmin(vals))
                summary.append((variant["label"], chi, float(vals[k]),
                                float(times[k])))
            rows = [tuple(float(col[i]) for col in data)
                    for i in range(len(times))]
            table = ResultTable(
                name=f"{_stem(cfg)}_{variant['label']}", columns=columns,
                rows=rows, kind="multi_curve",
                meta={"variant": variant["label"], "control": ckind})
            return table, summary
        return run

    results = _map([job(v) for v in cfg["variants"]], threads)
    tables = [t for t, _ in results]
    summary_rows = [row for _, s in results for row in s]
    tables.append(ResultTable(
        name=f"{_stem(cfg)}_summary",
        columns=["variant", "chi", "min_bound", "t_min"], rows=summary_rows,
        kind="summary", meta={"control": ckind}))
    return tables


def _run_bloch_single(cfg, threads):
    times = _grid_points(cfg["time_grid"])

    def job(variant):
        def run():
            probe = _probe_state(cfg["probe"], 1)
            spec = _ham_spec(cfg)
            system = engine.ReducedSystem(probe, spec,
                                          _channels(variant["channels"]),
                                          cfg["nominal"])
            rows = []
            for b in system.bundles(times):
                r = bloch_vector(b.blocks[0])
                rows.append((float(b.time), r.r_x, r.r_y, r.r_z))
            return ResultTable(
                name=f"{_stem(cfg)}_{variant['label']}",
                columns=["t", "r_x", "r_y", "r_z"], rows=rows, kind="bloch",
                meta={"variant": variant["label"]})
        return run

    return _map([job(v) for v in cfg["variants"]], threads)


def _run_matrix_movie(cfg, threads):
    n = cfg["n_spins"]
    snaps = [float(s) for s in cfg["snapshots"]]

    def job(variant):
        def run():
            probe = _probe_state(cfg["probe"], n)
            spec = _ham_spec(cfg)
            system = engine.ReducedSystem(probe, spec,
                                          _channels(variant["channels"]),
                                          cfg["nominal"])
            # symmetric (j = N/2) sector: the largest block in either
            # representation, with unit multiplicity
            idx = system.block_dims.index(n + 1)
            out = []
            for k, t in enumerate(snaps):
                block = system.bundle_at(t).blocks[idx]
                rows = [(i, jj, float(block[i, jj].real),
                         float(block[i, jj].imag))
                        for i in range(n + 1) for jj in range(n + 1)]
                out.append(ResultTable(
                    name=f"{_stem(cfg)}_{variant['label']}_s{k}",
                    columns=["row", "col", "real", "imag"], rows=rows,
                    kind="heatmap",
                    meta={"variant": variant["label"],
                          "t": format(t, ".17g"),
                          "basis": "dicke, index 0 is m=+j"}))
            return out
        return run

    return [t for group in _map([job(v) for v in cfg["variants"]], threads)
            for t in group]


_RUNNERS = {
    "husimi_oat": _run_husimi_oat,
    "husimi_tat": _run_husimi_tat,
    "qfi_curve": _run_qfi_curve,
    "gain_curve": _run_gain_curve,
    "n_scan": _run_n_scan,
    "control_sweep": _run_control_sweep,
    "qcrb_curve": _run_qcrb_curve,
    "qcrb_control": _run_qcrb_control,
    "bloch_single": _run_bloch_single,
    "matrix_movie": _run_matrix_movie,
}


def run_scenario(cfg: dict, threads: int = 1) -> list:
    """Execute a raw config; returns result tables (not yet written)."""
    norm = normalize_config(cfg)
    return _RUNNERS[norm["scenario"]](norm, threads)
