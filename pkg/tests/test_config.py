# -*- coding: utf-8 -*-

import copy
import json
import os

import numpy as np
import pytest
from conftest import small_config

import reachadp
from reachadp.config import config_from_dict, load_config
from reachadp.exceptions import ValidationError

CONFIG_DIR = os.path.join(os.path.dirname(reachadp.__file__), "benchmarks", "configs")


def test_shipped_configs():
    config = load_config(os.path.join(CONFIG_DIR, "example1_2d.json"))
    assert config.problem.horizon == 5
    assert config.synthesis.sample_rule == "linear"
    assert config.synthesis.num_basis == [100] * 5
    np.testing.assert_allclose(config.synthesis.variance_box.hi, [0.095, 0.095])
    assert config.evaluation.baseline == "lqg"

    config = load_config(os.path.join(CONFIG_DIR, "example2_2d.json"))
    assert config.problem.horizon == 7
    assert len(config.problem.obstacles) == 3
    assert config.evaluation.blocked


def test_random_obstacles_are_removed_from_safe_set():
    config = load_config(os.path.join(CONFIG_DIR, "example2_2d.json"))
    problem = config.problem
    assert problem.safe.volume() == pytest.approx(4.0 - 3 * 0.3**2)
    for box in problem.obstacles:
        assert not box.overlaps(problem.target.bounding_box())
        assert not problem.safe.interior_contains(box.center)
    # The placement only depends on the obstacle seed
    again = load_config(os.path.join(CONFIG_DIR, "example2_2d.json"))
    assert again.problem.hash() == problem.hash()


def test_small_config():
    config = config_from_dict(small_config())
    assert config.problem.state_dim == 1
    assert config.synthesis.seed == 2
    assert config.evaluation.rollouts == 5
    assert config.to_dict()["problem"]["horizon"] == 3


def test_with_seed():
    config = load_config(os.path.join(CONFIG_DIR, "example1_2d.json")).with_seed(7)
    assert config.synthesis.seed == 7
    assert config.evaluation.seed == 7
    np.testing.assert_allclose(config.synthesis.variance_box.lo, [0.02, 0.02])


@pytest.mark.parametrize(
    "section, key, value",
    [
        ("problem", "target", [{"lo": [-0.1], "hi": [1.5]}]),
        ("problem", "state_box", {"lo": [-1.0, -1.0], "hi": [1.0, 1.0]}),
        ("problem", "horizon", 0),
        ("problem", "colour", "blue"),
        ("synthesis", "epsilon", 1.2),
        ("synthesis", "sample_rule", "cubic"),
        ("synthesis", "num_basis", "many"),
        ("evaluation", "baseline", "pid"),
        ("evaluation", "rollouts", 0),
    ],
)
def test_invalid_configs(section, key, value):
    data = small_config()
    data[section][key] = value
    with pytest.raises(ValidationError):
        config_from_dict(data)


def test_missing_and_versioned():
    data = small_config()
    del data["synthesis"]
    with pytest.raises(ValidationError):
        config_from_dict(data)
    data = small_config()
    data["format_version"] = 2
    with pytest.raises(ValidationError):
        config_from_dict(data)
    data = copy.deepcopy(small_config())
    data["problem"]["kernel"]["components"] = []
    with pytest.raises(ValidationError):
        config_from_dict(data)


def test_unreadable_files(tmp_path):
    with pytest.raises(ValidationError):
        load_config(tmp_path / "missing.json")
    path = tmp_path / "broken.json"
    path.write_text("{")
    with pytest.raises(ValidationError):
        load_config(path)
    path.write_text(json.dumps(small_config()))
    assert load_config(path).source == str(path)
