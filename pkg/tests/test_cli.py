"""End-to-end command-line checks: the documented verbs, output formats,
determinism guarantees, exit codes, and the embedded reference dataset."""

import json
import shutil
import subprocess
import sys

import pytest

from oscrep.reference import data_text, dump_rows, load_rows

_CLI = [sys.executable, "-m", "oscrep.cli"]

_TABLE_HEADER = ("table,row,param_g_or_B,param_nu_or_c,l,rho_opt,"
                 "E_orm,E_paper,delta,E_oracle,delta_oracle,verdict")


def _run(*args, expect=0):
    proc = subprocess.run(_CLI + list(args), capture_output=True, text=True,
                          timeout=600)
    assert proc.returncode == expect, proc.stderr
    return proc


def _kv(stdout: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in stdout.splitlines() if line)


def test_solve_linear_confinement_example():
    out = _kv(_run("solve", "coulomb-power", "--g", "4", "--nu", "1",
                   "--l", "0").stdout)
    assert float(out["energy"]) == pytest.approx(2.7972, abs=2e-4)


def test_solve_screened_example():
    out = _kv(_run("solve", "escp", "--B", "1", "--c", "10", "--l", "2").stdout)
    assert float(out["energy"]) == pytest.approx(-0.111111, abs=5e-4)


def test_solve_bare_coulomb_orbital():
    out = _kv(_run("solve", "coulomb-power", "--g", "0", "--nu", "1",
                   "--l", "1").stdout)
    assert float(out["energy"]) == pytest.approx(-0.125, abs=1e-9)


def test_solve_radial_excitation():
    out = _kv(_run("solve", "coulomb-power", "--g", "0", "--n-r", "1").stdout)
    assert float(out["energy"]) == pytest.approx(-0.125, abs=1e-8)


def test_solve_json_format_round_trip():
    text_run = _kv(_run("solve", "coulomb-power", "--g", "4").stdout)
    json_run = json.loads(_run("--format", "json", "solve", "coulomb-power",
                               "--g", "4").stdout)
    assert json_run == text_run


def test_console_script_is_installed():
    exe = shutil.which("oscrep")
    assert exe is not None
    proc = subprocess.run([exe, "solve", "coulomb-power", "--g", "0", "--l", "1"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert float(_kv(proc.stdout)["energy"]) == pytest.approx(-0.125, abs=1e-9)


def test_table_one_report():
    proc = _run("table", "1")
    lines = proc.stdout.splitlines()
    assert lines[0] == _TABLE_HEADER
    assert len(lines) == 1 + 15  # 12 finite couplings + 3 limit rows
    assert "13/13 rows within tolerance" in proc.stderr
    verdicts = [line.split(",")[-1] for line in lines[1:]]
    assert verdicts.count("skip") == 2
    assert verdicts.count("pass") == 13


def test_table_output_is_byte_identical_across_runs_and_pools():
    first = _run("table", "1").stdout
    again = _run("table", "1").stdout
    pooled = _run("--jobs", "4", "table", "1").stdout
    assert first == again == pooled


def test_table_json_is_byte_stable():
    first = _run("--format", "json", "table", "1").stdout
    again = _run("--format", "json", "table", "1").stdout
    assert first == again
    payload = json.loads(first)
    assert payload["summary"] == "13/13 rows within tolerance"


def test_table_out_file(tmp_path):
    target = tmp_path / "report.csv"
    proc = _run("table", "1", "--out", str(target))
    assert proc.stdout == ""
    assert target.read_text().splitlines()[0] == _TABLE_HEADER


def test_sweep_over_orbital_momentum():
    proc = _run("sweep", "coulomb-power", "--g", "0", "--axis", "l",
                "--values", "0,1,2,3")
    lines = proc.stdout.splitlines()
    assert lines[0] == "l,E,rho_opt,Z"
    for line, l in zip(lines[1:], range(4)):
        cells = line.split(",")
        assert cells[0] == str(l)
        assert float(cells[1]) == pytest.approx(-0.5 / (l + 1) ** 2, abs=1e-9)


def test_sweep_scaled_column_tracks_strong_coupling():
    proc = _run("sweep", "coulomb-power", "--axis", "g",
                "--values", "100,10000,1000000", "--scaled")
    lines = proc.stdout.splitlines()
    assert lines[0] == "g,E,rho_opt,Z,E_scaled"
    scaled = [float(line.split(",")[-1]) for line in lines[1:]]
    assert scaled[0] < scaled[1] < scaled[2] < 1.8559
    assert scaled[2] == pytest.approx(1.8559, abs=0.02)


def test_sweep_plot_and_out_files(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    svg_path = tmp_path / "sweep.svg"
    proc = _run("sweep", "coulomb-power", "--g", "0", "--axis", "l",
                "--values", "0,1", "--out", str(csv_path),
                "--plot", str(svg_path))
    assert proc.stdout == ""
    assert csv_path.read_text().startswith("l,E,rho_opt,Z")
    svg = svg_path.read_text()
    assert svg.startswith("<svg")
    assert "polyline" in svg


def test_oracle_verb_agrees_on_hydrogen():
    proc = _run("oracle", "coulomb-power", "--g", "0", "--l", "0")
    out = _kv(proc.stdout)
    assert out["verdict"] == "pass"
    assert abs(float(out["delta"])) < 1e-6


@pytest.mark.parametrize("args", [
    ("solve", "coulomb-power"),                       # missing --g
    ("solve", "escp", "--B", "1"),                    # missing --c
    ("sweep", "coulomb-power", "--g", "1", "--axis", "q", "--values", "1"),
    ("sweep", "coulomb-power", "--g", "1", "--axis", "nu",
     "--values", "1,2", "--scaled"),                  # --scaled needs axis g
    ("sweep", "escp", "--c", "1", "--axis", "B", "--values", ""),
])
def test_usage_errors_exit_two(args):
    _run(*args, expect=2)


def test_unknown_config_key_exits_two(tmp_path):
    cfg = tmp_path / "solver.cfg"
    cfg.write_text("not_a_key=1\n")
    proc = _run("--config", str(cfg), "solve", "coulomb-power", "--g", "1",
                expect=2)
    assert "not_a_key" in proc.stderr


def test_config_override_is_applied(tmp_path):
    cfg = tmp_path / "solver.cfg"
    cfg.write_text("# narrow search window\nrho_bracket=0.05,0.3\n")
    out = _kv(_run("--config", str(cfg), "solve", "coulomb-power",
                   "--g", "0").stdout)
    assert "rho_at_bracket_edge" in out["flags"]
    assert float(out["energy"]) > -0.5  # clipped window misses the optimum


def test_numerical_failure_exits_three():
    proc = _run("solve", "escp", "--B", "4", "--c", "1e-6", expect=3)
    assert "no bound state" in proc.stderr


def test_reference_dataset_round_trips_losslessly():
    assert dump_rows(load_rows()) == data_text()


def test_reference_dataset_covers_every_printed_row():
    counts = {t: len(load_rows(t)) for t in (1, 2, 3, 4)}
    assert counts == {1: 15, 2: 30, 3: 30, 4: 27}
