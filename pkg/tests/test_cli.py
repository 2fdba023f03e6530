import json

import pandas as pd
import pytest

from src.cli.config import parse_config, parse_seed
from src.cli.main import main, emit_report, EXIT_PASSED, EXIT_CONFIG, EXIT_CAPACITY
from src.database.database import DatabaseManager
from src.experiments.identity import run_identity_check
from src.utils.errors import ConfigError


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_defaults_apply():
    config = parse_config("teleport", overrides={"seed": "5"})
    assert config.seed == 5
    assert config.parameters["mode"] == "shared-reference"
    assert config.parameters["trials"] == 10000
    assert config.out_dir == "."


def test_flags_override_file_and_preset(tmp_path):
    path = _write(tmp_path / "run.cfg", "# resource\nr=0.3\nseed=11\ndim=12\n")
    config = parse_config("separability", path, {"squeeze": "0.5", "seed": None}, preset="smoke")
    assert config.parameters["squeeze"] == 0.5
    assert config.parameters["dim"] == 12
    assert config.seed == 11


def test_unknown_key_is_named(tmp_path):
    path = _write(tmp_path / "run.cfg", "seed=1\nsqueze=0.3\n")
    with pytest.raises(ConfigError) as excinfo:
        parse_config("separability", path)
    assert excinfo.value.key == "squeze"
    assert "squeze" in str(excinfo.value)


def test_key_of_other_experiment_is_rejected():
    with pytest.raises(ConfigError):
        parse_config("molmer", overrides={"seed": 1, "lo_mag": 2.0})


def test_seed_is_required():
    with pytest.raises(ConfigError) as excinfo:
        parse_config("molmer")
    assert excinfo.value.key == "seed"


def test_seed_range():
    assert parse_seed("18446744073709551615") == 2 ** 64 - 1
    with pytest.raises(ConfigError):
        parse_seed(2 ** 64)
    with pytest.raises(ConfigError):
        parse_seed("-1")
    with pytest.raises(ConfigError):
        parse_seed("seven")


def test_values_are_range_checked():
    with pytest.raises(ConfigError):
        parse_config("molmer", overrides={"seed": 1, "trials": "0"})
    with pytest.raises(ConfigError):
        parse_config("distill", overrides={"seed": 1, "dim": "1"})
    with pytest.raises(ConfigError):
        parse_config("molmer", overrides={"seed": 1, "grid_points": "4"})
    with pytest.raises(ConfigError):
        parse_config("teleport", overrides={"seed": 1, "input_disp": "one"})
    with pytest.raises(ConfigError):
        parse_config("molmer", overrides={"seed": 1, "mag_a": "nan"})


def test_emit_is_byte_identical(tmp_path):
    first = emit_report(run_identity_check([1.0], seed=3), str(tmp_path / "a"))
    second = emit_report(run_identity_check([1.0], seed=3), str(tmp_path / "b"))
    assert [p.rsplit("/", 1)[-1] for p in first] == ["identity-check_report.json", "identity-check_identity.csv"]
    for left, right in zip(first, second):
        with open(left, "rb") as a, open(right, "rb") as b:
            assert a.read() == b.read()
    with open(first[0], encoding="utf-8") as handle:
        assert json.load(handle)["verdicts"]["identity_holds"] is True


def test_main_passes_identity(tmp_path):
    assert main(["identity-check", "--seed", "1", "--preset", "smoke", "--out", str(tmp_path)]) == EXIT_PASSED
    assert (tmp_path / "identity-check_report.json").exists()


def test_main_passes_separability(tmp_path):
    assert main(["separability", "--seed", "2", "--preset", "smoke", "--out", str(tmp_path)]) == EXIT_PASSED


def test_main_reports_truncation(tmp_path):
    code = main(["teleport", "--seed", "3", "--input-disp", "3", "--dim", "6", "--trials", "5",
                 "--out", str(tmp_path)])
    assert code == EXIT_CAPACITY


def test_main_reports_bad_config(tmp_path):
    path = _write(tmp_path / "run.cfg", "seed=1\nbogus=2\n")
    assert main(["molmer", "--config", path, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_molmer_posterior_trace_columns(tmp_path):
    main(["molmer", "--seed", "4", "--preset", "smoke", "--out", str(tmp_path)])
    frame = pd.read_csv(tmp_path / "molmer_posterior.csv")
    assert frame.shape[1] == 257
    assert frame.columns[0] == "step"


def test_main_writes_ledger(tmp_path):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    main(["identity-check", "--seed", "9", "--preset", "smoke", "--out", str(tmp_path), "--ledger", url])
    runs = DatabaseManager(url).get_runs()
    assert len(runs) == 1
    assert runs[0].status == "completed"
    assert runs[0].passed is True
    assert runs[0].seed == "9"


def test_oversized_two_mode_run_is_a_capacity_error(tmp_path):
    code = main(["teleport", "--seed", "1", "--dim", "100", "--trials", "2", "--out", str(tmp_path)])
    assert code == EXIT_CAPACITY
    assert main(["separability", "--seed", "1", "--dim", "25", "--out", str(tmp_path)]) == EXIT_CAPACITY


def test_phase_lock_smoke_passes(tmp_path):
    assert main(["phase-lock", "--seed", "2024", "--preset", "smoke", "--out", str(tmp_path)]) == EXIT_PASSED


def test_phase_lock_rejects_too_few_predictive_samples(tmp_path):
    code = main(["phase-lock", "--seed", "2024", "--preset", "smoke", "--predictive-samples", "50",
                 "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
