import json
import subprocess
import sys

import pytest

from minkforms import cli
from minkforms import exterior as ex
from minkforms.identities import Ops
from minkforms.wwe import WWEConfig, potential, solve

BASE = {"r1": 0.1, "r2": 0.2, "omega": 0.01, "epsilon": 6.0, "mu": 1.0, "B0": 1.0,
        "height": 1.0, "moment_of_inertia": 0.5}


@pytest.fixture
def config_file(tmp_path):
    def make(**overrides):
        data = dict(BASE, **overrides)
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(data))
        return str(p)

    return make


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_json_schema(config_file, capsys):
    code, out, _ = run(["wwe", "solve", "--config", config_file(samples=5)], capsys)
    assert code == 0
    rec = json.loads(out)
    assert list(rec) == ["config", "K", "L", "samples", "V_exact", "V_small_omega", "L_mech_z",
                         "L_em_numeric_z", "L_em_closed_magnitude", "residuals"]
    assert list(rec["residuals"]) == ["dF_max", "dstarG_max", "jump_r1", "jump_r2"]
    assert len(rec["samples"]) == 5 and list(rec["samples"][0]) == ["r", "E_r", "B", "H"]
    assert rec["K"] == 0.0 and rec["L"] == pytest.approx(1.0, abs=1e-14)
    assert rec["L_mech_z"] == pytest.approx(0.005)


def test_solve_small_omega_matches_closed_form(config_file, capsys):
    _, out, _ = run(["wwe", "solve", "--config", config_file()], capsys)
    rec = json.loads(out)
    expected = 0.5 * 1.0 * 0.01 / 6.0 * (1 - 6.0) * (0.2**2 - 0.1**2)
    assert rec["V_small_omega"] == pytest.approx(expected, rel=1e-15)


def test_solve_vacuum(config_file, capsys):
    _, out, _ = run(["wwe", "solve", "--config", config_file(epsilon=1.0, mu=1.0)], capsys)
    rec = json.loads(out)
    assert rec["V_exact"] == 0.0 and rec["V_small_omega"] == 0.0
    assert all(s["E_r"] == 0.0 for s in rec["samples"])
    assert all(s["B"] == pytest.approx(1.0, abs=1e-15) for s in rec["samples"])


def test_solve_roundtrip_and_determinism(config_file, tmp_path, capsys):
    path = config_file(samples=7)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["wwe", "solve", "--config", path, "--out", str(a)]) == 0
    assert cli.main(["wwe", "solve", "--config", path, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    cfg, opts = cli.load_config(path)
    assert json.loads(a.read_text()) == cli.solve_record(cfg, opts["samples"], opts["fd_step"])


def test_solve_csv(config_file, capsys):
    code, out, _ = run(["wwe", "solve", "--config", config_file(), "--samples", "3", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "r,E_r,B_z_interior,H_z_interior" and len(lines) == 4


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"omega": 10.0}, "superluminal rim"),
        ({"r1": "a"}, "field 'r1'"),
        ({"colour": 3}, "unknown field"),
        ({"samples": 0}, "field 'samples'"),
        ({"fd_step": 0}, "field 'fd_step'"),
    ],
)
def test_invalid_config(config_file, capsys, overrides, message):
    code, _, err = run(["wwe", "solve", "--config", config_file(**overrides)], capsys)
    assert code == 2 and message in err


def test_missing_field(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({k: v for k, v in BASE.items() if k != "B0"}))
    code, _, err = run(["wwe", "solve", "--config", str(p)], capsys)
    assert code == 2 and "missing field 'B0'" in err


def test_missing_config_file(capsys):
    code, _, err = run(["wwe", "solve", "--config", "/nonexistent/cfg.json"], capsys)
    assert code == 2 and "config not found" in err


def test_sweep_single_row_equals_solve(config_file, capsys):
    path = config_file(omega=0.0)
    _, out, _ = run(["wwe", "sweep", "--config", path, "--param", "omega", "--from", "0", "--to", "0",
                     "--steps", "1"], capsys)
    (row,) = json.loads(out)
    _, out, _ = run(["wwe", "solve", "--config", path], capsys)
    rec = json.loads(out)
    assert row["param"] == 0.0 and row["error"] is None
    assert row["V_exact"] == rec["V_exact"] and row["V_small_omega"] == rec["V_small_omega"]
    assert row["L_em_numeric"] == rec["L_em_numeric_z"]
    assert row["L_em_closed"] == rec["L_em_closed_magnitude"]


def test_sweep_csv_and_bad_bounds(config_file, capsys):
    path = config_file()
    code, out, _ = run(["wwe", "sweep", "--config", path, "--param", "epsilon", "--from", "0.5",
                        "--to", "2", "--steps", "4", "--format", "csv"], capsys)
    assert code == 0 and len(out.splitlines()) == 5
    code, _, err = run(["wwe", "sweep", "--config", path, "--param", "epsilon", "--from", "0.5",
                        "--to", "2", "--steps", "0"], capsys)
    assert code == 2 and "invalid sweep bounds" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["wwe", "sweep", "--config", path, "--param", "height", "--from", "1", "--to", "2",
                  "--steps", "2"])
    assert exc.value.code == 2


def test_residual_command(config_file, capsys):
    code, out, _ = run(["wwe", "residual", "--config", config_file()], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert all(c["pass"] for c in rep["checks"].values())
    code, _, err = run(["wwe", "residual", "--config", config_file(), "--h", "0"], capsys)
    assert code == 2 and "step" in err


def test_check_identities_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["check-identities", "--seed", "1", "--cases", "0"])
    assert exc.value.code == 2


def test_check_identities_passes(capsys):
    code, out, _ = run(["check-identities", "--seed", "2", "--cases", "30"], capsys)
    assert code == 0 and "hodge.5" in out


def test_check_identities_fault_injection(capsys):
    def broken(a, m):
        out = ex.hodge(a, m)
        return -out if a.grade == 3 else out

    class Args:
        seed, cases = 1, 30

    code = cli.cmd_check_identities(Args, ops=Ops(hodge=broken))
    err = capsys.readouterr().err
    assert code == 1
    assert "identity violated: hodge.5" in err
    replay = json.loads(err.splitlines()[1])
    assert replay["seed"] == 1 and "metric" in replay["case"]


def test_console_entry_point(config_file):
    proc = subprocess.run(
        [sys.executable, "-m", "minkforms.cli", "wwe", "solve", "--config", config_file(samples=2)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["K"] == 0.0
