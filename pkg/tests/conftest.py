# -*- coding: utf-8 -*-

import numpy as np
import pytest

from reachadp.kernels import GaussianMixtureKernel
from reachadp.problem import ReachAvoidProblem
from reachadp.utils.box import Box


def regulation_problem(n, horizon=3, variance=0.01):
    # Reach [-0.1, 0.1]^n from [-1, 1]^n under x+ = x + u + w
    return ReachAvoidProblem(
        state_box=Box(-np.ones(n), np.ones(n)),
        control_box=Box(-0.1 * np.ones(n), 0.1 * np.ones(n)),
        target=Box(-0.1 * np.ones(n), 0.1 * np.ones(n)),
        safe=Box(-np.ones(n), np.ones(n)),
        horizon=horizon,
        kernel=GaussianMixtureKernel.integrator(n, variance),
    )


@pytest.fixture(scope="function")
def problem_1d():
    return regulation_problem(1)


@pytest.fixture(scope="function")
def problem_2d():
    return regulation_problem(2)


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(12345)


def small_config():
    # 1D regulation experiment, small enough for the command line tests
    return {
        "format_version": 1,
        "problem": {
            "state_dim": 1,
            "control_dim": 1,
            "state_box": {"lo": [-1.0], "hi": [1.0]},
            "control_box": {"lo": [-0.1], "hi": [0.1]},
            "target": [{"lo": [-0.1], "hi": [0.1]}],
            "safe": [{"lo": [-1.0], "hi": [1.0]}],
            "horizon": 3,
            "kernel": {"A": [[1.0]], "B": [[1.0]], "components": [{"variance": [0.01]}]},
        },
        "synthesis": {"num_basis": 6, "epsilon": 0.2, "beta": 0.01, "seed": 2},
        "evaluation": {"initial_conditions": 3, "rollouts": 5, "baseline": "none"},
    }
