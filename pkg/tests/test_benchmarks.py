# -*- coding: utf-8 -*-

import json

import numpy as np
import pytest

from reachadp.benchmarks import example1_problem, example2_problem, run_suite
from reachadp.benchmarks.suites import (
    SAMPLE_SWEEP_HEADER,
    SUMMARY_HEADER,
    load_scale,
)
from reachadp.exceptions import ValidationError
from reachadp.utils.csv_output import read_csv


@pytest.fixture(scope="function")
def tiny_scale(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(
        json.dumps(
            {
                "dims": [1],
                "num_basis": 4,
                "basis_sweep": [4],
                "sample_sweep": [2, 200],
                "initial_conditions": 2,
                "rollouts": 3,
                "violation_samples": 100,
                "n_starts": 2,
            }
        )
    )
    return str(path)


def test_example_problems():
    problem = example1_problem(3)
    assert problem.horizon == 5
    assert problem.xbar.volume() == pytest.approx(8.0 - 0.2**3)
    problem = example2_problem(2, seed=4)
    assert problem.horizon == 7
    assert len(problem.obstacles) == 3
    assert problem.safe.volume() == pytest.approx(4.0 - 3 * 0.3**2)
    again = example2_problem(2, seed=4)
    assert again.hash() == problem.hash()


def test_load_scale():
    settings = load_scale("smoke")
    assert settings["num_basis"] == [20]
    assert load_scale("full")["num_basis"] == [100, 500, 1000]
    with pytest.raises(ValidationError):
        load_scale("enormous")


def test_load_scale_overrides(tmp_path):
    path = tmp_path / "scale.json"
    path.write_text(json.dumps({"dims": [2, 3], "num_basis": [10]}))
    with pytest.raises(ValidationError):
        load_scale(str(path))
    path.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(ValidationError):
        load_scale(str(path))
    path.write_text(json.dumps({"basis_sweep": []}))
    with pytest.raises(ValidationError):
        load_scale(str(path))


def test_run_suite_example1(tiny_scale, tmp_path):
    out = tmp_path / "bench"
    manifest = run_suite("example1", str(out), scale=tiny_scale, seed=1)
    assert manifest["files"] == [
        "example1_summary.csv",
        "example1_basis_sweep.csv",
        "example1_sample_sweep.csv",
    ]
    header, rows = read_csv(out / "example1_summary.csv")
    assert header == SUMMARY_HEADER
    assert rows[0][:3] == ["2", "4", "120"]
    header, rows = read_csv(out / "example1_sample_sweep.csv")
    assert header == SAMPLE_SWEEP_HEADER
    # Two scenarios cannot bound four weights
    assert rows[0][4] == "unbounded"
    assert rows[1][2] == "200"
    assert 0.0 <= float(rows[1][6]) <= 1.0
    stored = json.loads((out / "manifest.json").read_text())
    assert stored["horizon"] == 5
    assert len(stored["runs"]) == 2


def test_run_suite_rejects_unknown_suite(tmp_path):
    with pytest.raises(ValidationError):
        run_suite("example3", str(tmp_path))


def test_variance_default():
    assert np.allclose(example1_problem(1).kernel.variances, 0.01)
