"""Shared fixtures: miniature manifests in the engine's output format."""

import json

import pytest

FIG2_LIKE_CSV = """\
# spinmetro 0.1.0
# scenario: qfi_curve
# config-hash: sha256:abc
# table: demo_noiseless (kind: curve)
# columns: t,qfi,gain
t,qfi,gain
0.5,25,100
1,100,100
1.5,225,100
"""

FIG6_LIKE_CSV = """\
# spinmetro 0.1.0
# scenario: qcrb_curve
# config-hash: sha256:abc
# table: demo_local (kind: multi_curve)
# columns: t,noiseless,local_emission
t,noiseless,local_emission
0.5,4.1,4.4
1,1.2,1.5
1.5,0.6,0.9
"""


@pytest.fixture
def mini_run(tmp_path):
    """A tiny run directory: two CSVs plus a manifest referencing them."""
    run = tmp_path / "run"
    run.mkdir()
    (run / "demo_noiseless.csv").write_text(FIG2_LIKE_CSV)
    (run / "demo_local.csv").write_text(FIG6_LIKE_CSV)
    manifest = {
        "engine_version": "0.1.0",
        "scenario": "qfi_curve",
        "config_hash": "sha256:abc",
        "config": {},
        "tables": [
            {"name": "demo_noiseless", "path": "demo_noiseless.csv",
             "kind": "curve", "columns": ["t", "qfi", "gain"], "meta": {}},
            {"name": "demo_local", "path": "demo_local.csv",
             "kind": "multi_curve",
             "columns": ["t", "noiseless", "local_emission"],
             "meta": {"quantity": "weighted_qcrb_trace"}},
        ],
    }
    (run / "manifest.json").write_text(json.dumps(manifest))
    return run
