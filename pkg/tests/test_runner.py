import json
import math
from pathlib import Path

import numpy as np
import pytest

from superpulse import ConfigError, ParameterDomainError, compute_metrics, derive_params
from superpulse.cli import main
from superpulse.runner import (
    PRESETS,
    TRAJECTORY_HEADER,
    load_config,
    read_trajectory_csv,
    run_config,
    run_preset,
)

# small, fast weak-mode configuration used by most tests here
FAST_CONFIG = {
    "label": "fast",
    "params": {"n_atoms": 500, "omega0": 1e4, "g": 10.0},
    "regime": "weak",
}


def write_config(tmp_path: Path, doc: dict, name: str = "config.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_presets_cover_all_figures():
    assert sorted(PRESETS) == [f"fig{i}" for i in range(1, 9)]
    assert PRESETS["fig2"].omega0 == 1e5
    assert PRESETS["fig3"].g == 1e3
    assert PRESETS["fig4"].n_atoms == 10**6
    assert PRESETS["fig5"].n_atoms == 10**7
    assert PRESETS["fig6"].g == 0.0
    assert PRESETS["fig8"].omega0 == 1e3


def test_run_config_files_and_header(tmp_path):
    path = write_config(tmp_path, FAST_CONFIG)
    (result,) = run_config(path, out_dir=tmp_path)
    assert result.trajectory_path.exists()
    assert result.metrics_path.exists()
    first = result.trajectory_path.read_text().splitlines()[0]
    assert first == TRAJECTORY_HEADER


def test_metrics_roundtrip_from_csv(tmp_path):
    # metrics recomputed from the written trajectory match the emitted
    # metrics exactly (the CSV stores full precision)
    path = write_config(tmp_path, FAST_CONFIG)
    (result,) = run_config(path, out_dir=tmp_path)
    t, theta, phi, energy, intensity = read_trajectory_csv(result.trajectory_path)
    d = derive_params(load_config(path)[0].params)
    again = compute_metrics((t, energy, intensity), d)
    saved = json.loads(result.metrics_path.read_text())["pulse_metrics"]
    assert again.peak_intensity_scaled == saved["peak_intensity_scaled"]
    assert again.delay_time == saved["delay_time"]
    assert again.envelope_fwhm == saved["envelope_fwhm"]
    assert again.tau_c_measured == saved["tau_c_measured"]
    assert again.tau_1_measured == saved["tau_1_measured"]
    assert again.pulse_count_half_height == saved["pulse_count_half_height"]
    for key, value in again.ratios.items():
        assert value == saved["ratios"][key]


def test_identical_configs_are_byte_identical(tmp_path):
    path = write_config(tmp_path, FAST_CONFIG)
    (a,) = run_config(path, out_dir=tmp_path / "a")
    (b,) = run_config(path, out_dir=tmp_path / "b")
    assert a.trajectory_path.read_bytes() == b.trajectory_path.read_bytes()


def test_config_duplicating_preset_matches_it(tmp_path):
    preset = run_preset("fig7", out_dir=tmp_path / "preset")
    doc = {
        "label": "dup",
        "params": {"n_atoms": 10_000, "omega0": 1e6, "g": 0.0},
        "regime": "dicke",
    }
    (dup,) = run_config(write_config(tmp_path, doc), out_dir=tmp_path / "dup")
    assert dup.trajectory_path.read_bytes() == preset.trajectory_path.read_bytes()


def test_resolved_config_embedded_in_metrics(tmp_path):
    path = write_config(tmp_path, FAST_CONFIG)
    (result,) = run_config(path, out_dir=tmp_path)
    doc = json.loads(result.metrics_path.read_text())
    cfg = doc["config"]
    assert cfg["params"]["n_atoms"] == 500
    assert cfg["params"]["regime"] == "weak"
    assert cfg["t_end"] > 0
    assert cfg["integration"]["rtol"] == 1e-9
    assert "theta0" in cfg["init"]
    assert "definitions" in doc


def test_sweep_produces_monotone_peaks(tmp_path):
    doc = dict(FAST_CONFIG)
    doc["sweep"] = {"param": "g", "values": [0.0, 10.0, 100.0]}
    results = run_config(write_config(tmp_path, doc), out_dir=tmp_path)
    assert len(results) == 3
    peaks = [r.metrics.peak_intensity_scaled for r in results]
    assert peaks[0] < peaks[1] < peaks[2]
    assert {r.label for r in results} == {"fast_g0", "fast_g10", "fast_g100"}


def test_invalid_n_atoms_names_field(tmp_path):
    doc = {"params": {"n_atoms": 1, "omega0": 1e4}}
    with pytest.raises(ParameterDomainError) as exc:
        run_config(write_config(tmp_path, doc), out_dir=tmp_path)
    assert exc.value.field == "n_atoms"


@pytest.mark.parametrize(
    "doc",
    [
        {"params": {"n_atoms": 100, "omega0": 1e4}, "bogus": 1},
        {"params": {"n_atoms": 100, "omega0": 1e4, "extra": 2.0}},
        {"params": {"n_atoms": 100, "omega0": 1e4}, "integration": {"rtoll": 1e-9}},
        {"params": {"n_atoms": 100, "omega0": 1e4}, "regime": "medium"},
        {"params": {"omega0": 1e4}},
        {"params": {"n_atoms": 100, "omega0": 1e4}, "outputs": {"formats": ["xml"]}},
        {"params": {"n_atoms": 100, "omega0": 1e4}, "sweep": {"param": "gamma", "values": [1]}},
    ],
)
def test_bad_configs_rejected(tmp_path, doc):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, doc))


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n "params": {,}\n}')
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert "line 2" in str(exc.value)


def test_unknown_preset_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_preset("fig9", out_dir=tmp_path)


def test_preset_overrides_recorded(tmp_path):
    result = run_preset("fig7", out_dir=tmp_path, t_end=1e-3, theta0=0.01, phi0=0.5)
    cfg = json.loads(result.metrics_path.read_text())["config"]
    assert cfg["t_end"] == 1e-3
    assert cfg["init"]["theta0"] == 0.01
    assert cfg["init"]["phi0"] == 0.5


# --- command-line interface ----------------------------------------------

def test_cli_preset_runs(tmp_path, capsys):
    assert main(["preset", "fig7", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig7_trajectory.csv").exists()
    assert (tmp_path / "fig7_metrics.json").exists()
    assert "fig7" in capsys.readouterr().out


def test_cli_run_with_config(tmp_path, capsys):
    path = write_config(tmp_path, FAST_CONFIG)
    assert main(["run", "--config", str(path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fast_trajectory.csv").exists()


def test_cli_validation_exit_code(tmp_path, capsys):
    doc = {"params": {"n_atoms": 1, "omega0": 1e4}}
    path = write_config(tmp_path, doc)
    assert main(["run", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "n_atoms" in capsys.readouterr().err


def test_cli_budget_exit_code(tmp_path, capsys):
    doc = dict(FAST_CONFIG)
    doc["t_end"] = 1e6  # grid would need ~1e10 samples
    path = write_config(tmp_path, doc)
    assert main(["run", "--config", str(path), "--out", str(tmp_path)]) == 3


def test_cli_io_exit_code(tmp_path, capsys):
    blocker = tmp_path / "not_a_dir"
    blocker.write_text("plain file")
    path = write_config(tmp_path, FAST_CONFIG)
    code = main(["run", "--config", str(path), "--out", str(blocker / "sub")])
    assert code == 4
    assert "i/o error" in capsys.readouterr().err


def test_cli_oracle(tmp_path, capsys):
    assert main(["oracle", "--n", "10", "--gamma-eff", "1.0", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "oracle_n10_summary.json").read_text())
    assert summary["quanta_emitted"] == pytest.approx(10.0, rel=1e-6)
    csv = (tmp_path / "oracle_n10_trajectory.csv").read_text().splitlines()
    assert csv[0] == "gamma_t,mean_m,intensity_over_gamma_omega0"
