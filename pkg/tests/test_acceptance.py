# -*- coding: utf-8 -*-
"""Long end-to-end runs on the regulation benchmark, run with ``-m slow``."""

import numpy as np
import pytest

from reachadp.adp import SynthesisParams, synthesize
from reachadp.benchmarks.suites import basis_variance_box, example1_problem
from reachadp.evaluation import evaluate_stack, initial_conditions
from reachadp.oracle import grid_dp
from reachadp.utils import seeding
from reachadp.utils.box import sample_uniform

pytestmark = pytest.mark.slow


def example1_stack(n, num_basis, seed=0):
    problem = example1_problem(n)
    params = SynthesisParams(
        horizon=problem.horizon,
        num_basis=num_basis,
        epsilon=0.05,
        beta=0.01,
        variance_box=basis_variance_box(n),
        seed=seed,
        sample_rule="linear",
    )
    return synthesize(problem, params)


def test_predicted_and_simulated_values_agree():
    stack = example1_stack(2, 100)
    rng = seeding.derive_rng(0, seeding.INITIAL_CONDITIONS)
    x0s = initial_conditions(stack.problem, 100, rng)
    result = evaluate_stack(stack, x0s, 100, baseline="none")
    assert result.value_gap <= 0.15


def test_close_to_grid_dynamic_programming():
    stack = example1_stack(1, 50)
    gv = grid_dp(stack.problem, 200, 21)
    x = gv.grid.points()
    inside = stack.problem.xbar.contains(x)
    gap = np.abs(stack.evaluate(0, x[inside]) - gv.evaluate(0, x[inside]))
    assert np.mean(gap) <= 0.1


def test_upper_bound_against_grid_dynamic_programming():
    stack = example1_stack(1, 50)
    problem = stack.problem
    rng = np.random.default_rng(11)
    x = sample_uniform(problem.xbar, rng, size=1000)
    fine = grid_dp(problem, 400, 21).evaluate(0, x)
    # Resolution error of the grid oracle, estimated from one refinement
    grid_error = np.max(np.abs(fine - grid_dp(problem, 200, 21).evaluate(0, x)))
    above = stack.evaluate(0, x) >= fine - (grid_error + 1e-3)
    assert np.mean(above) >= 1.0 - stack.metadata[0]["epsilon"] - 0.02


def test_lqg_gap_shrinks_with_the_basis():
    rng = seeding.derive_rng(0, seeding.INITIAL_CONDITIONS)
    x0s = initial_conditions(example1_problem(2), 50, rng)
    gaps = []
    for num_basis in (50, 100, 200):
        stack = example1_stack(2, num_basis)
        result = evaluate_stack(stack, x0s, 100, baseline="lqg")
        gaps.append(result.baseline_gap)
    assert gaps[1] <= gaps[0] + 0.05
    assert gaps[2] <= gaps[1] + 0.05
    assert gaps[2] <= 0.15
