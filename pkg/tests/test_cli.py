import json
import math
import os

import numpy as np
import pytest

from app.cli.forms import load_run_config
from app.cli.writers import CSV_HEADER, read_series_csv, series_to_csv
from app.errors import ConfigError
from app.experiments.services import build_scenario, sweep
from app.models import SweepSeries, TimeGrid

SHORT_GRID = ["--t-stop", "10", "--t-step", "0.1"]


def _csv_rows(path):
    with open(path) as fh:
        return [line.rstrip("\n").split(",") for line in fh]


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def test_run_writes_jc_closed_form(runner, tmp_path):
    out = tmp_path / "e0g1_jc.csv"
    result = runner.invoke(args=["sim", "run", "--scenario", "e0g1", "--model", "jc", "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert "max concurrence" in result.output

    rows = _csv_rows(out)
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 2002
    for t, c, _, defined in rows[1:]:
        assert defined == "1"
        s2 = math.sin(0.4 * float(t)) ** 2
        assert abs(float(c) - s2 / (2 - s2)) <= 1e-8


def test_run_identical_states_are_all_one(runner, tmp_path):
    out = tmp_path / "e0e0.csv"
    result = runner.invoke(args=["sim", "run", "--scenario", "e0e0", "-o", str(out)])
    assert result.exit_code == 0, result.output
    for _, c, _, defined in _csv_rows(out)[1:]:
        if defined == "1":
            assert abs(float(c) - 1.0) <= 1e-9
        else:
            assert c == "nan"


def test_run_to_stdout(runner):
    result = runner.invoke(args=["sim", "run", "--scenario", "e0g1", *SHORT_GRID])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 102


def test_run_unknown_scenario(runner, tmp_path):
    out = tmp_path / "never.csv"
    result = runner.invoke(args=["sim", "run", "--scenario", "e7g7", "-o", str(out)])
    assert result.exit_code == 1
    assert "e7g7" in result.output
    assert not out.exists()


def test_run_missing_scenario(runner):
    result = runner.invoke(args=["sim", "run"])
    assert result.exit_code == 1
    assert "scenario" in result.output


def test_run_bad_flag_is_usage_error(runner):
    result = runner.invoke(args=["sim", "run", "--scenario", "e0g1", "--model", "dicke"])
    assert result.exit_code == 1


@pytest.mark.parametrize("flags", [["--n-fock", "1"], ["--t-step", "0"], ["--coupling", "-1"], ["--t-stop", "-5"]])
def test_run_invalid_numbers(runner, tmp_path, flags):
    out = tmp_path / "bad.csv"
    result = runner.invoke(args=["sim", "run", "--scenario", "e0g1", "-o", str(out), *flags])
    assert result.exit_code == 1
    assert not out.exists()


def test_run_initial_state_too_large(runner, tmp_path):
    result = runner.invoke(args=["sim", "run", "--scenario", "e0123g0123", "--n-fock", "3", *SHORT_GRID])
    assert result.exit_code == 1
    assert "Fock levels" in result.output


def test_run_is_idempotent(runner, tmp_path):
    out = tmp_path / "e01g01.csv"
    args = ["sim", "run", "--scenario", "e01g01", "-o", str(out), *SHORT_GRID]
    assert runner.invoke(args=args).exit_code == 0
    first = out.read_bytes()
    assert runner.invoke(args=args).exit_code == 0
    assert out.read_bytes() == first


def test_csv_round_trip(tmp_path):
    series = sweep(build_scenario("e0123g0123", grid=TimeGrid(0.0, 10.0, 0.05)))
    path = tmp_path / "series.csv"
    path.write_text(series_to_csv(series))
    parsed = read_series_csv(str(path))
    np.testing.assert_allclose(parsed.times, series.times, rtol=1e-11, atol=1e-12)
    np.testing.assert_array_equal(parsed.defined, series.defined)
    np.testing.assert_allclose(parsed.concurrence, series.concurrence, rtol=1e-11, atol=1e-12, equal_nan=True)
    np.testing.assert_allclose(parsed.success_probability, series.success_probability, rtol=1e-11, atol=1e-12)


def test_csv_uses_twelve_significant_digits():
    series = SweepSeries(np.array([0.0, 0.25]), np.array([np.nan, 1 / 3]), np.array([0.0, 0.5]))
    lines = series_to_csv(series).splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "0.00000000000e+00,nan,0.00000000000e+00,0"
    assert lines[2] == "2.50000000000e-01,3.33333333333e-01,5.00000000000e-01,1"


def test_run_json_output(runner, tmp_path):
    out = tmp_path / "e0e0.json"
    result = runner.invoke(args=["sim", "run", "--scenario", "e0e0", "--format", "json", "-o", str(out), *SHORT_GRID])
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    assert doc["metadata"]["label"] == "e0e0"
    assert doc["metadata"]["bell_state"] == "psi-"
    assert len(doc["points"]) == 101
    first = doc["points"][0]
    # both photons start in the vacuum: the measurement cannot succeed
    assert first["concurrence"] is None
    assert first["defined"] is False
    assert doc["summary"]["points"] == 101


def test_run_config_file_with_flag_override(runner, tmp_path):
    config = tmp_path / "run.toml"
    config.write_text(
        '[run]\nscenario = "e0g1"\nmodel = "jc"\nt_stop = 5.0\nt_step = 0.5\noutput_format = "json"\n'
    )
    out = tmp_path / "out.csv"
    result = runner.invoke(
        args=["sim", "run", "--config", str(config), "--format", "csv", "--t-step", "0.25", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = _csv_rows(out)
    assert len(rows) == 22
    assert rows[2][0] == "2.50000000000e-01"


def test_run_custom_scenario(runner, tmp_path):
    config = tmp_path / "custom.toml"
    config.write_text(
        "[run]\n"
        'scenario = "custom"\n'
        'model = "jc"\n'
        "t_stop = 5.0\n"
        "t_step = 0.5\n"
        "[custom]\n"
        "qubit1 = [0, 1]\n"
        "photons1 = [1]\n"
        "qubit2 = [1, 0]\n"
        'photons2 = [0, "1+0j"]\n'
    )
    out = tmp_path / "custom.csv"
    result = runner.invoke(args=["sim", "run", "--config", str(config), "-o", str(out)])
    assert result.exit_code == 0, result.output
    for t, c, _, _ in _csv_rows(out)[1:]:
        s2 = math.sin(0.4 * float(t)) ** 2
        assert abs(float(c) - s2 / (2 - s2)) <= 1e-8


def test_run_config_rejects_unknown_keys(runner, tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text('[run]\nscenario = "e0g1"\nfock = 3\n')
    result = runner.invoke(args=["sim", "run", "--config", str(config)])
    assert result.exit_code == 1
    assert "fock" in result.output


def test_run_detuning_scan(runner, tmp_path):
    out = tmp_path / "scan.csv"
    result = runner.invoke(
        args=["sim", "run", "--scenario", "e0g1", "--detuning", "0.8", "--detuning", "0.9",
              "--t-stop", "20", "--t-step", "0.5", "-o", str(out), "--plot-script"]
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "scan_w0.8.csv").exists()
    assert (tmp_path / "scan_w0.9.csv").exists()
    script = (tmp_path / "scan.gp").read_text()
    assert "scan_w0.8.csv" in script and "scan_w0.9.csv" in script


def test_load_run_config_precedence(app, tmp_path):
    config = tmp_path / "run.toml"
    config.write_text('[run]\nscenario = "e0e0"\nn_fock = 6\ncoupling = 0.1\n')
    cfg = load_run_config(app.config, str(config), {"coupling": 0.3})
    assert cfg.scenario == "e0e0"
    assert cfg.n_fock == 6
    assert cfg.coupling == 0.3
    assert cfg.t_step == app.config["T_STEP"]
    assert cfg.t_stop is None


def test_load_run_config_collects_errors(app):
    with pytest.raises(ConfigError) as excinfo:
        load_run_config(app.config, None, {"scenario": "e0g1", "n_fock": 1, "workers": 0})
    message = str(excinfo.value)
    assert "n_fock" in message and "workers" in message


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("figure_id, names", [
    ("1", ["fig1_A.csv", "fig1_B.csv", "fig1_C.csv"]),
    ("2", ["fig2_top_A.csv", "fig2_top_B.csv", "fig2_bottom_A.csv", "fig2_bottom_B.csv"]),
    ("5", ["fig5_A.csv"]),
])
def test_figures_emit_one_csv_per_curve(runner, tmp_path, figure_id, names):
    result = runner.invoke(args=["sim", "figures", figure_id, "--output-dir", str(tmp_path), "--step", "1.0"])
    assert result.exit_code == 0, result.output
    for name in names:
        assert (tmp_path / name).exists()
    script = (tmp_path / f"fig{figure_id}.gp").read_text()
    assert 'set datafile separator ","' in script
    for name in names:
        assert name in script
    assert sorted(os.listdir(tmp_path)) == sorted(names + [f"fig{figure_id}.gp"])


def test_figure_five_grid(runner, tmp_path):
    result = runner.invoke(args=["sim", "figures", "5", "--output-dir", str(tmp_path), "--step", "1.0"])
    assert result.exit_code == 0
    rows = _csv_rows(tmp_path / "fig5_A.csv")
    assert float(rows[-1][0]) == 400.0


def test_figures_unknown_id(runner, tmp_path):
    result = runner.invoke(args=["sim", "figures", "6", "--output-dir", str(tmp_path)])
    assert result.exit_code == 1
    assert "unknown figure" in result.output


# ---------------------------------------------------------------------------
# check-truncation
# ---------------------------------------------------------------------------

def test_check_truncation_passes_at_defaults(runner):
    result = runner.invoke(args=["sim", "check-truncation", "--scenario", "e0g1"])
    assert result.exit_code == 0, result.output
    assert "max leakage" in result.output
    assert "PASS" in result.output


def test_check_truncation_fails_when_state_does_not_fit(runner):
    result = runner.invoke(
        args=["sim", "check-truncation", "--scenario", "e0123g0123", "--n-fock", "2", "--t-stop", "5"]
    )
    assert result.exit_code == 2
    assert "FAIL" in result.output


def test_check_truncation_without_coupling(runner):
    result = runner.invoke(
        args=["sim", "check-truncation", "--scenario", "e01g01", "--coupling", "0", "--t-stop", "20"]
    )
    assert result.exit_code == 0, result.output
    assert "max leakage: 0.000e+00" in result.output
