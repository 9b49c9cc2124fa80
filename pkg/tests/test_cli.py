import csv
import io
import json
import math
import subprocess
import sys

import pytest

from trapped_pair import __version__
from trapped_pair.cli import PRESETS, ConfigError, build_config, main, read_config_file
from trapped_pair.spectrum import solve_branch
from trapped_pair.core import TrapGeometry

SMALL_SPECTRUM = ["spectrum", "--trap.eta", "2", "--sweep.inv_a.min", "-1",
                  "--sweep.inv_a.max", "1", "--sweep.inv_a.n", "3", "--sweep.branches", "2",
                  "--run.workers", "1"]


def _csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_spectrum_csv_contract(tmp_path):
    out = tmp_path / "s.csv"
    assert main(SMALL_SPECTRUM + ["--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    rows = _csv_rows(raw.decode())
    assert rows[0] == ["inv_a", "branch", "E_total", "E_shifted", "residual"]
    assert len(rows) == 1 + 2 * 3
    trap = TrapGeometry(2.0)
    for ia, br, et, es, res in rows[1:]:
        ref = solve_branch(float(ia), int(br), trap)
        assert float(es) == pytest.approx(ref.value, rel=1e-11, abs=1e-11)
        assert float(et) == pytest.approx(ref.total, rel=1e-11)
        assert float(res) < 1e-9


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(SMALL_SPECTRUM + ["--out", str(a)]) == 0
    assert main(SMALL_SPECTRUM + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_schema(capsys):
    assert main(SMALL_SPECTRUM + ["--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"meta", "data"}
    assert doc["meta"]["command"] == "spectrum"
    assert doc["meta"]["version"] == __version__
    assert doc["meta"]["config"]["trap.eta"] == "2"
    assert len(doc["data"]) == 6
    assert set(doc["data"][0]) == {"inv_a", "branch", "E_total", "E_shifted", "residual"}


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# spectrum run\ntrap.eta = 3\nsweep.inv_a.min = 0\nsweep.inv_a.max = 0\n"
                   "sweep.inv_a.n = 1\nsweep.branches = 1  # ground only\nrun.workers = 1\n")
    assert read_config_file(str(cfg))["sweep.branches"] == "1"
    assert main(["spectrum", "--config", str(cfg), "--trap.eta=1"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert float(rows[1][3]) == pytest.approx(solve_branch(0.0, 0, TrapGeometry(1.0)).value, abs=1e-11)


@pytest.mark.parametrize("argv,key", [
    (["spectrum"], "trap.eta"),
    (["spectrum", "--trap.eta", "abc"], "trap.eta"),
    (["spectrum", "--trap.eta", "1", "--bogus.key", "3"], "bogus.key"),
    (["spectrum", "--trap.eta", "-1"], "trap.eta"),
    (["spectrum", "--trap.eta", "1", "--sweep.inv_a.n", "0"], "sweep.inv_a.n"),
    (["wavefunction", "--trap.eta", "1", "--state.inv_a", "0", "--state.branch", "top"], "state.branch"),
    (["feshbach", "--preset", "fig11"], "feshbach"),
    (["spectrum", "--preset", "fig5"], "--preset"),
])
def test_config_errors_exit_1_and_name_key(argv, key, capsys):
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("trapped-pair: config key '")
    assert key in err


def test_partial_failure_exit_2(capsys):
    # at a = 0+ the bound branch does not exist: that row is a gap
    argv = ["spectrum", "--trap.eta", "1", "--sweep.inv_a.min", "inf", "--sweep.inv_a.max", "inf",
            "--sweep.inv_a.n", "1", "--sweep.branches", "2", "--run.workers", "1"]
    assert main(argv) == 2
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[1][2] == "nan"
    assert float(rows[2][3]) == 0.0


def test_wavefunction_command(capsys):
    argv = ["wavefunction", "--trap.eta", "1", "--state.inv_a", "0", "--state.branch", "ground",
            "--grid.rho.values", "0,0.5", "--grid.z.values", "0,0.5", "--run.workers", "1"]
    assert main(argv) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == ["rho", "z", "psi", "r_psi", "residual"]
    origin = rows[1]
    assert origin[2] == "inf" and float(origin[3]) == pytest.approx(1 / (2 * math.pi), rel=1e-11)
    assert len(rows) == 5


def test_lowdim_command(capsys):
    argv = ["lowdim-compare", "--trap.eta", "10", "--sweep.inv_a.min", "0", "--sweep.inv_a.max", "0",
            "--sweep.inv_a.n", "1", "--sweep.branches", "2", "--run.workers", "1"]
    assert main(argv) in (0, 2)
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == ["inv_a", "branch", "E_exact", "E_lowdim_static", "E_lowdim_energy", "residual"]
    assert len(rows) == 3


def test_feshbach_trap_units(capsys):
    argv = ["feshbach", "--trap.eta", "1", "--feshbach.units", "trap", "--feshbach.a_bg", "0.3",
            "--feshbach.delta_b_mt", "2", "--feshbach.b0_mt", "100", "--feshbach.em_slope", "0.5",
            "--sweep.b.min_mt", "101", "--sweep.b.max_mt", "104", "--sweep.b.n", "3",
            "--sweep.branches", "2", "--run.workers", "1"]
    assert main(argv) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == ["B", "branch", "E", "a_eff", "is_divergence_locus", "residual"]
    locus = [r for r in rows[1:] if r[4] == "1"]
    assert len(locus) == 3 and all(r[1] == "-1" for r in locus)
    assert all(float(r[5]) < 1e-9 for r in rows[1:] if r[4] == "0")


def test_specfun_check(capsys):
    assert main(["specfun-check"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0] == ["name", "value", "reference", "rel_err", "pass"]
    assert all(r[4] == "1" or r[4].lower() == "true" for r in rows[1:])


def test_presets_validate():
    for name, preset in PRESETS.items():
        raw = dict(preset)
        command = raw.pop("command")
        if name in ("fig11", "fig12"):
            # resonance parameters are not built in and must be supplied
            with pytest.raises(ConfigError, match="feshbach"):
                build_config(command, raw)
            continue
        build_config(command, raw)


def test_nonfinite_grid_endpoint_rejected():
    assert main(["spectrum", "--trap.eta", "1", "--sweep.inv_a.max", "inf"]) == 1


def test_build_config_rejects_format():
    with pytest.raises(ConfigError):
        build_config("spectrum", {"trap.eta": "1"}, fmt="xml")


def test_console_entry_point_version():
    out = subprocess.run([sys.executable, "-m", "trapped_pair.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert __version__ in out.stdout
