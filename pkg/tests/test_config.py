"""Configuration loading, validation, and workspace wiring."""
import numpy as np
import pytest

from sccprem import Workspace, load_config
from sccprem.config import (load_climate_params, load_damage_kinds,
                            load_expert_anchors, sha256_file)
from sccprem.errors import ConfigError


def write_user_config(tmp_path, body):
    path = tmp_path / "user.yaml"
    path.write_text(body)
    return path


def test_packaged_defaults(tmp_path):
    cfg = load_config(output_dir=tmp_path)
    assert cfg.base_scenario == "ssp2"
    assert cfg.base_damage_kind == "dice2023"
    assert cfg.base_elasticity == pytest.approx(-0.36)
    assert cfg.base_variant == "base"
    assert cfg.pulse_year == 2020 and cfg.horizon == 2300
    assert cfg.pulse_gtc == 1.0
    assert cfg.preferences_path == "demo"
    assert cfg.workers == 1
    assert len(cfg.geo_region) >= 2
    assert cfg.source_digest


def test_user_override_merges_into_defaults(tmp_path):
    path = write_user_config(tmp_path, """
base:
  scenario: ssp3
  income_elasticity: 0.0
numeric:
  workers: 2
  horizon: 2200
""")
    cfg = load_config(path, output_dir=tmp_path)
    assert cfg.base_scenario == "ssp3"
    assert cfg.base_elasticity == 0.0
    assert cfg.workers == 2 and cfg.horizon == 2200
    # untouched keys keep their defaults
    assert cfg.base_damage_kind == "dice2023"
    assert cfg.pulse_year == 2020


def test_workers_argument_beats_config(tmp_path):
    path = write_user_config(tmp_path, "numeric:\n  workers: 2\n")
    cfg = load_config(path, output_dir=tmp_path, workers=4)
    assert cfg.workers == 4


@pytest.mark.parametrize("body,needle", [
    ("numeric:\n  horizon: 2050\n", "horizon"),
    ("numeric:\n  pulse_gtc: 0\n", "pulse_gtc"),
    ("numeric:\n  workers: 99\n", "workers"),
    ("base:\n  calibration_variant: quantile\n", "variant"),
    ("base:\n  income_elasticity: -5\n", "elasticity"),
    ("paths:\n  preferences: /does/not/exist.csv\n", "preferences"),
    ("paths:\n  climate: /does/not/exist.yaml\n", "climate"),
], ids=["horizon", "pulse", "workers", "variant", "elasticity",
        "prefs-path", "climate-path"])
def test_validation_rejects_bad_values(tmp_path, body, needle):
    path = write_user_config(tmp_path, body)
    with pytest.raises(ConfigError, match=needle):
        load_config(path, output_dir=tmp_path)


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.yaml")
    bad = write_user_config(tmp_path, "- just\n- a list\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(bad, output_dir=tmp_path)


def test_packaged_climate_params(tmp_path):
    cfg = load_config(output_dir=tmp_path)
    carbon, climate = load_climate_params(cfg.climate)
    assert sum(carbon.shares) == pytest.approx(1.0, abs=1e-9)
    assert np.isinf(max(carbon.timescales))
    assert climate.sensitivity > 0 and climate.response_time > 0
    assert climate.initial_temp > 0


def test_packaged_damage_kinds(tmp_path):
    cfg = load_config(output_dir=tmp_path)
    kinds = load_damage_kinds(cfg.damage_functions)
    assert kinds["dice2023"]["kind"] == "polynomial"
    assert kinds["dice2023"]["coefficients"][2] == pytest.approx(0.003467)
    assert kinds["howard_sterner"]["coefficients"][2] == pytest.approx(0.007438)
    assert kinds["tol2024"]["coefficients"][2] == pytest.approx(0.002388)
    assert kinds["tol2009_bilinear"]["kind"] == "bilinear"
    assert len(kinds["tol2009_bilinear"]["coefficients"]) == 3


def test_packaged_expert_anchors(tmp_path):
    cfg = load_config(output_dir=tmp_path)
    anchors = load_expert_anchors(cfg.expert_anchors)
    assert anchors.rho_q5 == pytest.approx(0.0)
    assert anchors.rho_q95 == pytest.approx(0.05)
    assert anchors.eta_q5 == pytest.approx(0.5)
    assert anchors.eta_q95 == pytest.approx(3.0)
    assert anchors.provenance


def test_demo_extract_is_deterministic(tmp_path):
    ws1 = Workspace(load_config(output_dir=tmp_path / "a"))
    ws2 = Workspace(load_config(output_dir=tmp_path / "b"))
    f1, f2 = ws1.preferences_file(), ws2.preferences_file()
    assert f1 != f2
    assert sha256_file(f1) == sha256_file(f2)
    prefs, report = ws1.load_preferences()
    assert len(prefs) == 79273
    assert len(set(prefs.country)) == 76
    assert report.n_malformed == 0


def test_workspace_caches(demo_workspace):
    ws = demo_workspace
    a = ws.mdp("ssp2", "dice2023", -0.36)
    b = ws.mdp("ssp2", "dice2023", -0.36)
    assert a is b
    off = ws.mdp("ssp2", "dice2023", -0.36, use_cache=False)
    assert off is not a
    assert np.array_equal(off.delta_damage, a.delta_damage)
    p1, _, _ = ws.calibrated("base")
    p2, _, _ = ws.calibrated("base")
    assert p1 is p2


def test_workspace_unknown_damage_kind(demo_workspace):
    with pytest.raises(ConfigError, match="unknown damage kind"):
        demo_workspace.damage_spec("nordhaus1992", -0.36)


def test_input_digests_cover_all_inputs(demo_workspace):
    digests = demo_workspace.input_digests()
    for key in ("config", "scenario_registry", "country_weights",
                "damage_functions", "expert_anchors", "climate", "preferences"):
        assert key in digests
        assert len(digests[key]) == 64
    assert sum(k.startswith("scenario:") for k in digests) == 9
