"""Tests for scenario config validation, normalization, and runners."""

import copy
import json

import numpy as np
import pytest

from spinmetro.cli import bundled_config_names, load_bundled_config
from spinmetro.scenarios import (ConfigError, SCENARIO_KINDS, normalize_config,
                                 run_scenario, validate_config)
from spinmetro.tables import NumericalFailure


def _qfi_cfg(**overrides):
    cfg = {
        "scenario": "qfi_curve",
        "n_spins": 3,
        "probe": "ghz_z",
        "time_grid": {"start": 0.2, "stop": 1.0, "num": 5},
        "variants": [
            {"label": "noiseless", "channels": []},
            {"label": "collective_dephasing",
             "channels": [{"scope": "collective", "kind": "dephasing",
                           "rate": 0.2}]},
        ],
        "output": {"stem": "demo"},
    }
    cfg.update(overrides)
    return cfg


def test_bundled_configs_all_valid():
    names = bundled_config_names()
    assert len(names) == 12
    for name in names:
        cfg = load_bundled_config(name)
        assert validate_config(cfg) == [], name


def test_valid_config_has_no_diagnostics():
    assert validate_config(_qfi_cfg()) == []


def test_unknown_scenario_rejected():
    errs = validate_config(_qfi_cfg(scenario="qfi_surface"))
    assert errs and "scenario" in errs[0]


def test_unknown_key_rejected():
    errs = validate_config(_qfi_cfg(smoothing=True))
    assert any("smoothing" in e for e in errs)


def test_missing_required_key_rejected():
    cfg = _qfi_cfg()
    del cfg["time_grid"]
    errs = validate_config(cfg)
    assert any("time_grid" in e for e in errs)


def test_missing_rate_rejected():
    cfg = _qfi_cfg()
    del cfg["variants"][1]["channels"][0]["rate"]
    errs = validate_config(cfg)
    assert any("rate" in e for e in errs)


def test_local_noise_spin_cap():
    cfg = _qfi_cfg(n_spins=20)
    cfg["variants"][1]["channels"][0]["scope"] = "local"
    errs = validate_config(cfg)
    assert errs


def test_normalize_fills_defaults_and_is_idempotent():
    norm = normalize_config(_qfi_cfg())
    again = normalize_config(copy.deepcopy(norm))
    assert norm == again
    assert "tolerances" in norm


def test_normalize_rejects_invalid():
    with pytest.raises(ConfigError):
        normalize_config(_qfi_cfg(scenario="nope"))


def test_qfi_curve_runner_output_shape():
    tables = run_scenario(_qfi_cfg())
    names = {t.name for t in tables}
    assert names == {"demo_noiseless", "demo_collective_dephasing"}
    for t in tables:
        assert list(t.columns) == ["t", "qfi", "gain"]
        assert len(t.rows) == 5
        ts, qs, gs = zip(*t.rows)
        assert all(abs(g - q / tt ** 2) < 1e-9
                   for tt, q, g in zip(ts, qs, gs))
    # noiseless GHZ: Q = N^2 t^2
    noiseless = next(t for t in tables if t.name == "demo_noiseless")
    for tt, q, _ in noiseless.rows:
        assert abs(q - 9 * tt ** 2) < 1e-6


def test_runner_threads_match_serial():
    cfg = _qfi_cfg()
    serial = run_scenario(cfg, threads=1)
    threaded = run_scenario(cfg, threads=4)
    assert [t.name for t in serial] == [t.name for t in threaded]
    for a, b in zip(serial, threaded):
        assert a.rows == b.rows


def test_bloch_single_runner():
    cfg = {
        "scenario": "bloch_single",
        "n_spins": 1,
        "time_grid": {"start": 0.0, "stop": 2.0, "num": 5},
        "nominal": {"phi": 0.5},
        "variants": [
            {"label": "noiseless", "channels": []},
            {"label": "emission",
             "channels": [{"scope": "local", "kind": "emission",
                           "rate": 0.2}]},
        ],
        "output": {"stem": "bloch"},
    }
    assert validate_config(cfg) == []
    tables = run_scenario(cfg)
    assert {t.name for t in tables} == {"bloch_noiseless", "bloch_emission"}
    for t in tables:
        assert list(t.columns) == ["t", "r_x", "r_y", "r_z"]
        norms = [np.hypot(np.hypot(x, y), z) for _, x, y, z in t.rows]
        assert all(n <= 1.0 + 1e-9 for n in norms)


def test_husimi_oat_runner_snapshot_tables():
    cfg = {
        "scenario": "husimi_oat",
        "n_spins": 4,
        "snapshots": [0.0, np.pi / 2],
        "grid": {"n_theta": 31, "n_phi": 61},
        "output": {"stem": "oat"},
    }
    assert validate_config(cfg) == []
    tables = run_scenario(cfg)
    assert [t.name for t in tables] == ["oat_s0", "oat_s1"]
    for t in tables:
        assert list(t.columns) == ["theta", "phi", "husimi"]
        assert len(t.rows) == 31 * 61
        assert t.kind == "sphere"


def test_matrix_movie_runner():
    cfg = {
        "scenario": "matrix_movie",
        "n_spins": 4,
        "probe": "ghz_z",
        "snapshots": [0.0, 1.0],
        "variants": [
            {"label": "local_emission",
             "channels": [{"scope": "local", "kind": "emission",
                           "rate": 0.2}]},
        ],
        "output": {"stem": "mov"},
    }
    assert validate_config(cfg) == []
    tables = run_scenario(cfg)
    assert len(tables) == 2
    t0 = tables[0]
    assert list(t0.columns) == ["row", "col", "real", "imag"]
    assert len(t0.rows) == 25  # symmetric block is 5x5 at N=4
    # t=0 snapshot is the GHZ_z density matrix
    vals = {(r, c): (re, im) for r, c, re, im in t0.rows}
    assert abs(vals[(0, 0)][0] - 0.5) < 1e-9
    assert abs(vals[(4, 4)][0] - 0.5) < 1e-9


def test_all_kinds_are_tested_or_bundled():
    bundled_kinds = {load_bundled_config(n)["scenario"]
                     for n in bundled_config_names()}
    # gain_curve is exercised directly below; everything else is bundled
    assert bundled_kinds == set(SCENARIO_KINDS) - {"gain_curve"}


def test_gain_curve_runner():
    cfg = _qfi_cfg(scenario="gain_curve")
    assert validate_config(cfg) == []
    tables = run_scenario(cfg)
    noiseless = next(t for t in tables if t.name == "demo_noiseless")
    assert "gain" in list(noiseless.columns)
    gain_col = list(noiseless.columns).index("gain")
    for row in noiseless.rows:
        assert abs(row[gain_col] - 9.0) < 1e-6
