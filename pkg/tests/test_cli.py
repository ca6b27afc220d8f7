# -*- coding: utf-8 -*-

import json

import pytest
from conftest import small_config

from reachadp.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main
from reachadp.utils.csv_output import read_csv


def write_config(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture(scope="function")
def config_path(tmp_path):
    return write_config(tmp_path / "config.json", small_config())


def test_synthesize_and_inspect(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["synthesize", "--config", config_path, "--out-dir", str(out)]) == EXIT_OK
    assert (out / "value_stack.txt").exists()
    report = json.loads((out / "synthesis_report.json").read_text())
    assert [stage["k"] for stage in report["stages"]] == [2, 1, 0]
    assert report["synthesis"]["seed"] == 2

    assert main(["inspect", str(out / "value_stack.txt")]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "horizon: 3" in printed
    assert "stage 0:" in printed


def test_synthesize_is_deterministic(config_path, tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["synthesize", "--config", config_path, "--out-dir", str(first)]) == EXIT_OK
    assert (
        main(["synthesize", "--config", config_path, "--out-dir", str(second), "--workers", "2"])
        == EXIT_OK
    )
    assert (first / "value_stack.txt").read_bytes() == (second / "value_stack.txt").read_bytes()


def test_seed_override_changes_stack(config_path, tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    main(["synthesize", "--config", config_path, "--out-dir", str(first)])
    main(["synthesize", "--config", config_path, "--out-dir", str(second), "--seed", "11"])
    assert (first / "value_stack.txt").read_bytes() != (second / "value_stack.txt").read_bytes()


def test_evaluate_with_grid_baseline(tmp_path):
    data = small_config()
    data["evaluation"].update(baseline="grid", grid_resolution=20, control_resolution=5)
    config_path = write_config(tmp_path / "config.json", data)
    out = tmp_path / "out"
    assert main(["synthesize", "--config", config_path, "--out-dir", str(out)]) == EXIT_OK
    stack = str(out / "value_stack.txt")
    assert (
        main(["evaluate", "--config", config_path, "--stack", stack, "--out-dir", str(out)])
        == EXIT_OK
    )
    header, rows = read_csv(out / "evaluation.csv")
    assert header[-2:] == ["V0_grid", "|V0_grid-V_ADP|"]
    assert len(rows) == 4
    assert rows[-1][0] == "mean"
    header, rows = read_csv(out / "grid_value.csv")
    assert header == ["x_1", "V0_grid"]
    assert len(rows) == 20


def test_evaluate_stack_of_other_problem(config_path, tmp_path):
    out = tmp_path / "out"
    main(["synthesize", "--config", config_path, "--out-dir", str(out)])
    data = small_config()
    data["problem"]["horizon"] = 4
    other = write_config(tmp_path / "other.json", data)
    args = ["evaluate", "--config", other, "--stack", str(out / "value_stack.txt")]
    assert main(args + ["--out-dir", str(out)]) == EXIT_VALIDATION


def test_malformed_config_writes_nothing(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"format_version": 1, "problem": {}}')
    out = tmp_path / "out"
    assert main(["synthesize", "--config", str(path), "--out-dir", str(out)]) == EXIT_VALIDATION
    assert not out.exists()


def test_missing_config(tmp_path):
    args = ["synthesize", "--config", str(tmp_path / "none.json"), "--out-dir", str(tmp_path)]
    assert main(args) == EXIT_VALIDATION


def test_invalid_workers(config_path, tmp_path):
    args = ["synthesize", "--config", config_path, "--out-dir", str(tmp_path), "--workers", "0"]
    assert main(args) == EXIT_VALIDATION


def test_unbounded_lp_exit_code(tmp_path):
    data = small_config()
    data["synthesis"]["num_samples"] = 1
    config_path = write_config(tmp_path / "config.json", data)
    out = tmp_path / "out"
    assert main(["synthesize", "--config", config_path, "--out-dir", str(out)]) == EXIT_NUMERICAL
    assert not (out / "value_stack.txt").exists()


def test_benchmark_rejects_empty_sweep(tmp_path):
    scale = tmp_path / "scale.json"
    scale.write_text(json.dumps({"sample_sweep": []}))
    args = ["benchmark", "example1", "--scale", str(scale), "--out-dir", str(tmp_path / "out")]
    assert main(args) == EXIT_VALIDATION


def test_benchmark_rejects_unknown_scale(tmp_path):
    args = ["benchmark", "example2", "--scale", "huge", "--out-dir", str(tmp_path / "out")]
    assert main(args) == EXIT_VALIDATION


@pytest.mark.slow
def test_benchmark_smoke(tmp_path):
    out = tmp_path / "bench"
    assert main(["benchmark", "example1", "--scale", "smoke", "--out-dir", str(out)]) == EXIT_OK
    for name in (
        "example1_summary.csv",
        "example1_basis_sweep.csv",
        "example1_sample_sweep.csv",
        "manifest.json",
    ):
        assert (out / name).exists()
