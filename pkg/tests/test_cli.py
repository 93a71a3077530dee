"""Config parsing, CLI exit codes, and output determinism."""

import json

import pytest

from spinlink.cli import main
from spinlink.config import ConfigError, load_config, parse_spin, resolve_config

MINI_THERMAL = """
mode = "thermal"
[model]
n_sites = 6
s_bulk = "1/2"
s_link = "1/2"
[grids]
lambdas = [0.02, 0.1]
betas = [1e3]
[solver]
seed = 11
[output]
directory = "{out}"
"""

MINI_DYNAMICS = """
mode = "dynamics"
[model]
n_sites = 4
s_bulk = 0.5
s_link = 0.5
[grids]
lambdas = [0.2]
omega_count = 3
time_horizon = 20.0
dt = 0.1
trajectory_stride = 5
[solver]
seed = 11
[output]
directory = "{out}"
"""

ORACLE = """
mode = "oracle-check"
[model]
n_sites = 5
s_bulk = "1/2"
s_link = "1/2"
[solver]
seed = 11
[output]
directory = "{out}"
"""


def write_config(tmp_path, text, name="cfg.toml"):
    out = tmp_path / "results"
    path = tmp_path / name
    path.write_text(text.format(out=out))
    return path, out


# -------------------------------------------------------------------- parsing


def test_parse_spin_forms():
    assert parse_spin("1/2", "k") == 0.5
    assert parse_spin("3/2", "k") == 1.5
    assert parse_spin(1, "k") == 1.0
    assert parse_spin(2.5, "k") == 2.5
    for bad in (0.3, "2/3", 0, -1, "x", True):
        with pytest.raises(ConfigError):
            parse_spin(bad, "k")


def test_unknown_keys_fatal(tmp_path):
    path, _ = write_config(tmp_path, MINI_THERMAL + "\n[grids2]\nx = 1\n")
    with pytest.raises(ConfigError, match="grids2"):
        load_config(path, "thermal")
    path2 = tmp_path / "c2.toml"
    path2.write_text(MINI_THERMAL.format(out=tmp_path) + "\n[model.extra]\nz = 2\n")
    with pytest.raises(ConfigError, match="extra"):
        load_config(path2, "thermal")


def test_seed_mandatory(tmp_path):
    text = MINI_THERMAL.replace("seed = 11", "")
    path, _ = write_config(tmp_path, text)
    with pytest.raises(ConfigError, match="seed"):
        load_config(path, "thermal")
    # the CLI flag satisfies the requirement
    cfg = load_config(path, "thermal", seed_override=99)
    assert cfg.seed == 99


@pytest.mark.parametrize(
    "mutation,fragment",
    [
        ("n_sites = 6", "n_sites = 3"),
        ('s_bulk = "1/2"', "s_bulk = 0.3"),
        ("lambdas = [0.02, 0.1]", "lambdas = []"),
        ("lambdas = [0.02, 0.1]", "lambdas = [0.1, 0.02]"),
        ("lambdas = [0.02, 0.1]", "lambdas = [-0.1]"),
        ("betas = [1e3]", "betas = [0.0]"),
        ("seed = 11", "seed = -2"),
    ],
)
def test_range_rejections(tmp_path, mutation, fragment):
    path, _ = write_config(tmp_path, MINI_THERMAL.replace(mutation, fragment))
    with pytest.raises(ConfigError):
        load_config(path, "thermal")


def test_mode_mismatch(tmp_path):
    path, _ = write_config(tmp_path, MINI_THERMAL)
    with pytest.raises(ConfigError, match="mode"):
        load_config(path, "dynamics")


def test_lambda_log_grid():
    raw = {
        "mode": "thermal",
        "model": {"n_sites": 6, "s_bulk": 0.5, "s_link": 0.5},
        "grids": {"lambda_points": 5, "lambda_min": 1e-3, "lambda_max": 1.0},
        "solver": {"seed": 3},
    }
    cfg = resolve_config(raw, "thermal")
    assert len(cfg.lambdas) == 5
    assert cfg.lambdas[0] == pytest.approx(1e-3)
    assert cfg.lambdas[-1] == pytest.approx(1.0)
    raw["grids"]["lambdas"] = [0.1]
    with pytest.raises(ConfigError, match="not both"):
        resolve_config(raw, "thermal")


# ------------------------------------------------------------------- commands


def test_validate_exit_codes(tmp_path, capsys):
    path, _ = write_config(tmp_path, MINI_THERMAL)
    assert main(["validate", "--config", str(path)]) == 0
    resolved = json.loads(capsys.readouterr().out)
    assert resolved["model"]["n_sites"] == 6
    bad, _ = write_config(tmp_path, MINI_THERMAL.replace("n_sites = 6", "n_sites = 3"), "bad.toml")
    assert main(["validate", "--config", str(bad)]) == 2
    assert main(["validate", "--config", str(tmp_path / "missing.toml")]) == 4


def test_thermal_run_and_determinism(tmp_path, capsys):
    path, out = write_config(tmp_path, MINI_THERMAL)
    assert main(["thermal", "--config", str(path)]) == 0
    assert main(["thermal", "--config", str(path), "--out", str(tmp_path / "again")]) == 0
    first = sorted(out.glob("thermal_*.csv"))[0].read_bytes()
    second = sorted((tmp_path / "again").glob("thermal_*.csv"))[0].read_bytes()
    assert first == second
    lines = first.decode().splitlines()
    assert lines[0].startswith("row_type,beta,lambda,entanglement,purity,k_used,truncation_margin")
    assert sum(1 for ln in lines if ln.startswith("point,")) == 2
    assert sum(1 for ln in lines if ln.startswith("summary,")) == 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 11
    assert len(manifest["certificates"]) == 2
    assert all("truncation_margin" in c for c in manifest["certificates"])


def test_dynamics_run(tmp_path):
    path, out = write_config(tmp_path, MINI_DYNAMICS)
    assert main(["dynamics", "--config", str(path)]) == 0
    table = sorted(out.glob("dynamics_*.csv"))[0].read_text().splitlines()
    assert table[0].startswith("row_type,lambda,omega,t,entanglement,norm_drift")
    kinds = {ln.split(",")[0] for ln in table[1:]}
    assert kinds == {"trajectory", "omega_summary", "lambda_summary"}
    # trajectory rows carry the norm-drift certificate
    tr = [ln.split(",") for ln in table[1:] if ln.startswith("trajectory,")]
    assert all(float(r[5]) < 1e-8 for r in tr)


def test_oracle_check_pass(tmp_path, capsys):
    path, out = write_config(tmp_path, ORACLE)
    assert main(["oracle-check", "--config", str(path)]) == 0
    printed = capsys.readouterr().out
    assert printed.count("PASS") == 3
    table = sorted(out.glob("oracle-check_*.csv"))[0].read_text().splitlines()
    assert table[0] == "check,dimension,value,threshold,status"
    assert len(table) == 4


def test_seed_override_changes_manifest(tmp_path):
    path, out = write_config(tmp_path, MINI_THERMAL)
    assert main(["thermal", "--config", str(path), "--seed", "1234"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 1234


def test_empty_lambda_grid_rejected(tmp_path):
    path, _ = write_config(tmp_path, MINI_THERMAL.replace("lambdas = [0.02, 0.1]", "lambdas = []"))
    assert main(["thermal", "--config", str(path)]) == 2


def test_capacity_exceeded_is_config_error(tmp_path):
    text = MINI_THERMAL.replace("seed = 11", "seed = 11\nmax_dim = 16")
    path, _ = write_config(tmp_path, text)
    assert main(["thermal", "--config", str(path)]) == 2
