import json

import numpy as np
import pytest

from cit_filter import config
from cit_filter.cli import main
from cit_filter.errors import ConfigError
from cit_filter.io import read_csv, sha256


def test_unknown_key_is_named():
    with pytest.raises(ConfigError) as exc:
        config.parse_text("scenario = fig4\nspeed = 3\n")
    assert exc.value.key == "speed"
    assert "speed" in str(exc.value)


def test_comments_and_presets(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# fig 5 at another ratio\nscenario = fig5  # preset\nratio = 0.02\n",
                    encoding="utf-8")
    cfg = config.load(str(path))
    assert cfg["ratio"] == 0.02 and cfg["n_max"] == 100


def test_bad_values():
    with pytest.raises(ConfigError):
        config.load("fig6", {"n_points": "many"})
    with pytest.raises(ConfigError):
        config.load("fig6", {"scheme": "leapfrog"})
    with pytest.raises(ConfigError):
        config.load("nonexistent")


def test_lab_params_from_preset():
    cfg = config.load("conditions")
    p = config.system_params(cfg)
    assert p.unit_system == "physical"
    assert config.pulse_spec(cfg).t_p == pytest.approx(1e-6)


def test_conditions_command(capsys):
    assert main(["conditions", "conditions"]) == 0
    out = capsys.readouterr().out
    assert "C = 15" in out and "OD = 50" in out
    assert "cavity lifetime" in out and "[FAILED]" in out


def test_fig4_run(tmp_path):
    out = tmp_path / "fig4"
    assert main(["run", "fig4", "-o", str(out)]) == 0
    data = read_csv(out / "fig4_velocity.csv")
    assert len(data["N"]) == 30
    assert np.all(np.diff(data["v_over_c"]) > 0)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["inputs"]["ratio"] == 1.0
    assert manifest["files"]["fig4_velocity.csv"] == sha256(out / "fig4_velocity.csv")


def test_fig5_reruns_bitwise(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "fig5", "-o", str(a)]) == 0
    assert main(["run", "fig5", "-o", str(b)]) == 0
    assert (a / "fig5_velocity.csv").read_bytes() == (b / "fig5_velocity.csv").read_bytes()
    data = read_csv(a / "fig5_velocity.csv")
    assert data["rel_diff"].max() <= 0.05


def test_velocity_table(tmp_path):
    assert main(["run", "group_velocity_table", "-o", str(tmp_path)]) == 0
    data = read_csv(tmp_path / "group_velocity.csv")
    assert set(data) == {"N", "v_over_c_r=0.1", "v_over_c_r=1", "v_over_c_r=10"}


def test_fig6_small_run_reproducible(tmp_path):
    sets = ["n_points=256", "n_points_2d=48", "w_ramp=0.15", "t_end=1.0", "snapshots=0 1.0", "record_every=8"]
    args = [x for s in sets for x in ("--set", s)]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "fig6", "-o", str(a), *args]) == 0
    assert main(["run", "fig6", "-o", str(b), *args]) == 0
    for name in ("sector1_snapshots.csv", "sector2_diagonal.csv", "sector2_antidiagonal.csv"):
        x, y = read_csv(a / name), read_csv(b / name)
        for col in x:
            np.testing.assert_allclose(x[col], y[col], rtol=0, atol=1e-12)
    heat = read_csv(a / "sector2_heatmap.csv")
    assert len(heat["t"]) == 2 * 48 * 48
    meta = json.loads((a / "sector2_heatmap.json").read_text())
    assert meta["columns"] == ["t", "z1", "z2", "abs2_ff"]


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "fig4", "--set", "colour=red"]) == 2
    assert "colour" in capsys.readouterr().err
    assert main(["run", "fig6", "-o", str(tmp_path), "--set", "dt=1.0"]) == 2
    assert main(["validate", "--quick", "--override", "es<-ss=1.41421356"]) == 4


def test_schema_lists_keys(capsys):
    assert main(["schema"]) == 0
    out = capsys.readouterr().out
    assert all(key in out for key in config.SCHEMA)
