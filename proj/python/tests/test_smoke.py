import json
import math

import numpy as np
import pytest

import synccool


def test_uniform_order_parameter():
    assert synccool.solve_x2_uniform(20.0, 40.0) == 0.0
    assert abs(synccool.solve_x2_uniform(10.0, 40.0) - 0.044951) < 1e-6
    assert synccool.solve_x2_pinned(20.0, 40.0, 1.0) == pytest.approx(0.125)


def test_density_matches_uniform():
    x = (np.arange(4096) + 0.5) * 2 * math.pi / 4096
    assert synccool.solve_x2_density(10.0, 40.0, x.tolist()) == pytest.approx(
        synccool.solve_x2_uniform(10.0, 40.0), abs=1e-6
    )


def test_steady_state_profiles():
    s = synccool.steady_state(100, 780.0, 390.0, 10.0, 40.0, grid_points=256)
    assert s["x"].shape == (256,)
    assert np.all(s["z0"] <= 1.0)
    flips = np.count_nonzero(np.diff(np.sign(s["s0"])) != 0)
    assert flips == 2
    assert s["omega0"] == pytest.approx(5.0)


def test_fdt_limit():
    p2 = synccool.p2_infinity(0.499 * 40.0, 390.0, 780.0, 40.0)
    assert p2 == pytest.approx(0.125 * 20.0, rel=0.02)
    assert synccool.p2_infinity(10.0, -390.0, 780.0, 40.0) == math.inf


def test_sweep():
    r = synccool.sweep([195.0, 390.0, 585.0], [4.0, 8.0, 12.0, 16.0], 780.0, 40.0)
    assert r["p2_min"].shape == (3,)
    assert r["p2_opt"] <= r["p2_min"].min()


def test_presets_and_errors():
    names = synccool.preset_names()
    assert "fig3c" in names and "fig10" in names
    cfg = synccool.preset("fig3c")
    assert cfg["initial"]["p2_initial"] == 5
    cfg["physics"]["kappa"] = -1
    with pytest.raises(ValueError):
        synccool.normalize_config(cfg)
    with pytest.raises(synccool.InvalidParameter):
        synccool.preset("nope")


def test_simulation_is_deterministic():
    cfg = synccool.preset("fig4")
    cfg["physics"]["n_atoms"] = 20
    cfg["integration"]["t_end"] = 1.0
    cfg["integration"]["sample_interval"] = 0.1
    a = synccool.simulate(cfg)
    b = synccool.simulate(json.dumps(cfg))
    assert a["t"].shape == (11,)
    np.testing.assert_array_equal(a["p2_mean"], b["p2_mean"])
    assert "xdagx_mf" in a


def test_run_writes_files(tmp_path):
    cfg = synccool.preset("fig7")
    meta = synccool.run(cfg, tmp_path)
    assert meta["status"] == "completed"
    assert (tmp_path / "profiles.csv").exists()
    assert (tmp_path / "metadata.json").exists()
