"""Command-line driver: exit codes, file outputs, and reproducibility."""
import csv
import json
import subprocess
import sys
import time

import pytest

from tvareff import run_validation
from tvareff.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_NUMERICAL,
    EXIT_OK,
    main,
)


def _read_table(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    return list(csv.DictReader(lines[1:])), json.loads(lines[0][len("# config: "):])


def _write_prices(path, prices, start_day=1):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,close\n")
        day = start_day
        month = 1
        for p in prices:
            fh.write(f"2020-{month:02d}-{day:02d},{p}\n")
            day += 1
            if day > 28:
                day, month = 1, month + 1
    return path


def _synthetic_config(tmp_path, **overrides):
    config = {
        "inputs": [{"asset_id": "sim", "synthetic": {
            "kind": "constant_ar", "q": 1, "t": 300, "seed": 5,
            "coefficients": [0.5], "innovation_sd": 0.02}}],
        "n_boot": 200,
        "level": 0.95,
        "seed": 11,
        "output_dir": str(tmp_path / "out"),
    }
    config.update(overrides)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    return path


def test_stats_on_fixtures(data_dir, tmp_path):
    code = main([
        "stats", str(data_dir / "btc_daily.csv"), str(data_dir / "eth_daily.csv"),
        "--output-dir", str(tmp_path),
    ])
    assert code == EXIT_OK
    rows, config = _read_table(tmp_path / "stats.csv")
    assert config["q"] == "auto" and config["seed"] == 0
    by_asset = {row["asset_id"]: row for row in rows}
    btc, eth = by_asset["btc_daily"], by_asset["eth_daily"]
    assert int(btc["n_obs"]) == 2346 and int(eth["n_obs"]) == 1515
    assert round(float(btc["mean"]), 4) == 0.0018
    assert round(float(btc["sd"]), 4) == 0.0431
    assert round(float(eth["min"]), 4) == -1.3021
    assert round(float(eth["max"]), 4) == 0.4123
    assert btc["adf_reject_1pct"] == "true"
    assert int(btc["adf_lag"]) == 1 and int(eth["adf_lag"]) == 2


def test_stats_json_format(data_dir, tmp_path):
    code = main([
        "stats", str(data_dir / "btc_daily.csv"),
        "--output-dir", str(tmp_path), "--format", "json",
    ])
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "stats.json").read_text())
    assert payload["config"]["format"] == "json"
    assert payload["rows"][0]["asset_id"] == "btc_daily"
    assert abs(payload["rows"][0]["mean"] - 0.0018) < 5e-5


def test_stats_tiny_series_notes_insufficient_data(tmp_path):
    src = _write_prices(tmp_path / "tiny.csv", [100.0, 101.0, 99.5, 100.7, 100.2])
    code = main(["stats", str(src), "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    rows, _ = _read_table(tmp_path / "stats.csv")
    assert rows[0]["adf_stat"] == ""
    assert "insufficient observations" in rows[0]["note"]


def test_missing_input_file_is_a_data_error(tmp_path, capsys):
    missing = tmp_path / "ghost.csv"
    code = main(["stats", str(missing), "--output-dir", str(tmp_path)])
    assert code == EXIT_DATA
    assert str(missing) in capsys.readouterr().err


def test_config_errors(tmp_path):
    bad_json = tmp_path / "broken.json"
    bad_json.write_text("{not json")
    assert main(["stats", "--config", str(bad_json)]) == EXIT_CONFIG

    unknown_key = tmp_path / "unknown.json"
    unknown_key.write_text(json.dumps({"inputs": [], "smoothing": 3}))
    assert main(["stats", "--config", str(unknown_key)]) == EXIT_CONFIG

    assert main(["stats", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG

    src = _write_prices(tmp_path / "p.csv", [1.0, 1.1, 1.2, 1.3, 1.4])
    assert main(["efficiency", str(src), "--n-boot", "50"]) == EXIT_CONFIG
    assert main(["efficiency", str(src), "--level", "1.5"]) == EXIT_CONFIG
    assert main(["stats"]) == EXIT_CONFIG


def test_bad_synthetic_input_is_a_config_error(tmp_path):
    config = _synthetic_config(tmp_path)
    data = json.loads(config.read_text())
    data["inputs"][0]["synthetic"]["volatility"] = 2.0
    config.write_text(json.dumps(data))
    assert main(["stats", "--config", str(config)]) == EXIT_CONFIG

    data["inputs"][0] = {"asset_id": "x"}
    config.write_text(json.dumps(data))
    assert main(["stats", "--config", str(config)]) == EXIT_CONFIG


def test_constant_prices_fail_numerically(tmp_path, capsys):
    src = _write_prices(tmp_path / "flat.csv", [5.0] * 40)
    code = main(["efficiency", str(src), "--n-boot", "100", "--q", "1",
                 "--output-dir", str(tmp_path / "out")])
    assert code == EXIT_NUMERICAL
    assert "numerical error" in capsys.readouterr().err


def test_efficiency_synthetic_run_rerun_and_flag_precedence(tmp_path):
    config = _synthetic_config(tmp_path)
    code = main(["efficiency", "--config", str(config), "--n-boot", "100"])
    assert code == EXIT_OK
    out = tmp_path / "out"
    series = out / "sim_efficiency.csv"
    summary = out / "sim_summary.csv"
    first = (series.read_bytes(), summary.read_bytes())

    assert main(["efficiency", "--config", str(config), "--n-boot", "100"]) == EXIT_OK
    assert (series.read_bytes(), summary.read_bytes()) == first

    rows, embedded = _read_table(series)
    assert embedded["n_boot"] == 100  # the flag wins over the config file
    assert embedded["level"] == 0.95 and embedded["seed"] == 11
    assert rows[0]["date"] == "2000-01-02"  # first estimable period at q = 1
    assert {"zeta", "lower", "upper", "inefficient"} <= set(rows[0])

    summary_rows, _ = _read_table(summary)
    values = {row["key"]: row["value"] for row in summary_rows}
    assert values["q"] == "1"  # selected by the order search on this draw
    assert values["q_selection"] == "auto"
    assert float(values["mean_zeta"]) > 0.5


def test_efficiency_exports_coefficients_on_request(tmp_path):
    config = _synthetic_config(tmp_path, n_boot=100)
    code = main(["efficiency", "--config", str(config), "--export-coefficients"])
    assert code == EXIT_OK
    coef = tmp_path / "out" / "sim_coefficients.csv"
    rows, _ = _read_table(coef)
    assert {"date", "a0", "a1", "se0", "se1"} <= set(rows[0])
    assert len(rows) == 299


def test_json_summary_embeds_reproducing_config(tmp_path):
    config = _synthetic_config(tmp_path, n_boot=100, format="json")
    assert main(["efficiency", "--config", str(config)]) == EXIT_OK
    out = tmp_path / "out"
    series_bytes = (out / "sim_efficiency.json").read_bytes()
    embedded = json.loads((out / "sim_summary.json").read_text())["config"]

    replay = tmp_path / "replay.json"
    replay.write_text(json.dumps(embedded))
    assert main(["efficiency", "--config", str(replay)]) == EXIT_OK
    assert (out / "sim_efficiency.json").read_bytes() == series_bytes


def test_validate_fast_passes(tmp_path):
    code = main(["validate", "--fast", "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    rows, _ = _read_table(tmp_path / "validation.csv")
    assert len(rows) == 4
    assert all(row["passed"] == "true" for row in rows)


def test_validation_battery_is_fast():
    start = time.time()
    report = run_validation(include_bootstrap=False)
    assert time.time() - start < 5.0
    assert report.all_passed


def test_console_entry_point(tmp_path):
    src = _write_prices(tmp_path / "p.csv", [100.0, 101.0, 103.0, 102.0, 104.0, 105.0])
    proc = subprocess.run(
        [sys.executable, "-c",
         "import sys; from tvareff.cli import main; sys.exit(main(sys.argv[1:]))",
         "stats", str(src), "--output-dir", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "stats.csv").exists()
