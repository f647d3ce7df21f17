"""Tests for the command-line subcommands and exit codes."""

import csv
import json

import pytest

from src.backend.datasets import load_csv
from src.cli.app import main, parse_cells, trace_path
from src.utils.config import CLI_EXIT_CODES
from src.utils.errors import ConfigError


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def test_train_writes_report_and_trace(tmp_path):
    out = tmp_path / "report.json"
    code = main(["train", "--out", str(out), "--engine", "quantum", "--n_params", "5", "--k", "3", "--seed", "2"])
    assert code == CLI_EXIT_CODES["ok"]
    report = json.loads(out.read_text())
    assert report["config"]["seed"] == 2
    assert len(report["best_params"]) == 5
    assert 0.0 <= report["train_accuracy"] <= 1.0
    rows = _read_csv(trace_path(out))
    assert rows[0][:3] == ["iteration", "reference_index", "reference_magnitude"]
    assert len(rows) == 1 + len(report["trace"])


def test_train_rerun_from_embedded_config_is_bit_identical(tmp_path):
    first = tmp_path / "first.json"
    assert main(["train", "--out", str(first), "--engine", "brute", "--n_params", "4", "--k", "4"]) == 0
    config_path = tmp_path / "embedded.json"
    config_path.write_text(json.dumps(json.loads(first.read_text())["config"]))
    second = tmp_path / "second.json"
    assert main(["train", "--config", str(config_path), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_invalid_config_exits_with_field_path(tmp_path, caplog):
    code = main(["train", "--out", str(tmp_path / "r.json"), "--data_dim", "2"])
    assert code == CLI_EXIT_CODES["config"]
    assert "circuit.data_dim" in caplog.text
    assert not (tmp_path / "r.json").exists()


def test_resource_limit_exit_code(tmp_path):
    code = main(["train", "--out", str(tmp_path / "r.json"), "--engine", "brute", "--n_params", "30"])
    assert code == CLI_EXIT_CODES["resource"]


def test_runtime_error_exit_code(tmp_path):
    code = main(
        ["evaluate", "--out", str(tmp_path / "e.json"), "--n_params", "2", "--params", "01", "--data", str(tmp_path / "none.csv")]
    )
    assert code == CLI_EXIT_CODES["runtime"]


def test_invalid_utf8_data_exits_with_runtime_code(tmp_path):
    data = tmp_path / "latin1.csv"
    data.write_bytes(b"0.5,1\n\xff,0\n")
    code = main(["evaluate", "--out", str(tmp_path / "e.json"), "--n_params", "2", "--params", "01", "--data", str(data)])
    assert code == CLI_EXIT_CODES["runtime"]


def test_train_extends_the_history_file(tmp_path):
    history = tmp_path / "runs.json"
    for seed in (1, 2):
        out = tmp_path / f"report{seed}.json"
        args = ["train", "--out", str(out), "--engine", "brute", "--n_params", "4", "--k", "3", "--seed", str(seed)]
        assert main(args + ["--history", str(history)]) == CLI_EXIT_CODES["ok"]
    runs = json.loads(history.read_text())
    assert len(runs) == 2
    assert runs[-1]["best_params"] == json.loads(out.read_text())["best_params"]
    assert runs[-1]["engine"] == "brute"


def test_unreadable_history_stops_before_training(tmp_path):
    history = tmp_path / "runs.json"
    history.write_text("{\"not\": \"a list\"}")
    out = tmp_path / "report.json"
    code = main(["train", "--out", str(out), "--engine", "brute", "--n_params", "3", "--history", str(history)])
    assert code == CLI_EXIT_CODES["runtime"]
    assert not out.exists()


def test_evaluate_record(tmp_path):
    out = tmp_path / "evaluation.json"
    code = main(["evaluate", "--out", str(out), "--n_params", "4", "--k", "6", "--params", "0110"])
    assert code == 0
    record = json.loads(out.read_text())
    recount = sum(int(p > record["threshold"]) == y for p, y in zip(record["probabilities"], record["labels"]))
    assert record["accuracy"] == recount / 6
    assert record["params"] == "0110"


def test_evaluate_rejects_wrong_parameter_length(tmp_path):
    code = main(["evaluate", "--out", str(tmp_path / "e.json"), "--n_params", "4", "--params", "011"])
    assert code == CLI_EXIT_CODES["config"]


def test_boundary_grid(tmp_path):
    out = tmp_path / "grid.csv"
    code = main(
        ["boundary", "--out", str(out), "--n_params", "3", "--params", "101", "--grid_res", "3", "--threshold_mode", "fixed"]
    )
    assert code == 0
    rows = _read_csv(out)
    assert rows[0] == ["f_1", "p_10", "class"]
    assert [float(row[0]) for row in rows[1:]] == [-1.0, 0.0, 1.0]


def test_boundary_needs_low_dimension(tmp_path):
    path = tmp_path / "wide.csv"
    path.write_text("0.1,0.2,0.3,1\n")
    code = main(
        [
            "boundary",
            "--out",
            str(tmp_path / "grid.csv"),
            "--source",
            "file",
            "--path",
            str(path),
            "--data_dim",
            "3",
            "--n_params",
            "3",
            "--params",
            "101",
            "--threshold_mode",
            "fixed",
        ]
    )
    assert code == CLI_EXIT_CODES["runtime"]


def test_compare_empty_matrix(tmp_path):
    out = tmp_path / "compare.csv"
    assert main(["compare", "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert len(rows) == 1
    assert rows[0][:2] == ["n", "k"]


def test_compare_table(tmp_path):
    out = tmp_path / "compare.csv"
    assert main(["compare", "--out", str(out), "--cells", "5x1,3x2", "--workers", "2"]) == 0
    rows = _read_csv(out)
    assert [row[:2] for row in rows[1:]] == [["5", "1"], ["3", "2"]]
    header = rows[0]
    assert [row[header.index("speedup")] for row in rows[1:]] == ["True", "False"]


def test_gen_data_round_trips(tmp_path):
    out = tmp_path / "data.csv"
    assert main(["gen-data", "--out", str(out), "--k", "12", "--test_k", "3", "--header"]) == 0
    dataset = load_csv(out, has_header=True)
    assert len(dataset) == 12
    assert len(load_csv(tmp_path / "data.test.csv", has_header=True)) == 3


def test_parse_cells():
    assert parse_cells("12x2, 4X4") == [(12, 2), (4, 4)]
    assert parse_cells("") == []
    with pytest.raises(ConfigError):
        parse_cells("12-2")
