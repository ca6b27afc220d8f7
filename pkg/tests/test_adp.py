# -*- coding: utf-8 -*-

import numpy as np
import pytest
from conftest import regulation_problem

from reachadp.adp import (
    SynthesisParams,
    ValueStack,
    default_variance_box,
    empirical_violation,
    objective_coefficients,
    synthesize,
)
from reachadp.basis import Grbf
from reachadp.exceptions import LpUnboundedError, ValidationError
from reachadp.lp.instance import SOLVED
from reachadp.scenario import ScenarioParams, sample_bound
from reachadp.utils.box import Box


@pytest.fixture(scope="function")
def params_1d():
    return SynthesisParams(horizon=3, num_basis=10, epsilon=0.2, beta=0.01, seed=4)


def test_params_broadcast_and_validation():
    params = SynthesisParams(horizon=3, num_basis=[5, 6, 7], epsilon=0.1, beta=0.01)
    assert params.num_basis == [5, 6, 7]
    assert params.epsilon == [0.1, 0.1, 0.1]
    with pytest.raises(ValidationError):
        SynthesisParams(horizon=3, num_basis=[5, 6], epsilon=0.1, beta=0.01)
    with pytest.raises(ValidationError):
        SynthesisParams(horizon=3, num_basis=5, epsilon=1.5, beta=0.01)
    with pytest.raises(ValidationError):
        SynthesisParams(horizon=3, num_basis=5, epsilon=0.1, beta=0.01, sample_rule="other")
    with pytest.raises(ValidationError):
        SynthesisParams(horizon=0, num_basis=5, epsilon=0.1, beta=0.01)


def test_default_variance_box(problem_2d):
    box = default_variance_box(problem_2d)
    np.testing.assert_allclose(box.lo, [0.02**2] * 2)
    np.testing.assert_allclose(box.hi, [0.1**2] * 2)


def test_synthesize_1d(problem_1d, params_1d):
    stack = synthesize(problem_1d, params_1d)
    assert stack.horizon == 3
    n_expected = sample_bound(ScenarioParams(0.2, 0.01, 10))
    for k in range(3):
        meta = stack.metadata[k]
        assert meta["N"] == n_expected
        assert meta["status"] in SOLVED
        assert stack.stages[k].has_weights()
    # Regions: 1 on K, 0 outside K'
    assert stack.evaluate(0, np.array([0.0])) == 1.0
    assert stack.evaluate(0, np.array([1.5])) == 0.0
    assert stack.evaluate(3, np.array([0.5])) == 0.0
    summary = stack.summary()
    assert [row["k"] for row in summary] == [2, 1, 0]


def test_synthesize_is_deterministic(problem_1d, params_1d):
    a = synthesize(problem_1d, params_1d)
    b = synthesize(problem_1d, params_1d)
    for k in range(3):
        np.testing.assert_array_equal(a.stages[k].weights, b.stages[k].weights)
        np.testing.assert_array_equal(a.stages[k].centers, b.stages[k].centers)


def test_synthesize_workers_do_not_change_result(problem_1d, params_1d):
    a = synthesize(problem_1d, params_1d)
    b = synthesize(problem_1d, params_1d, workers=2)
    for k in range(3):
        np.testing.assert_array_equal(a.stages[k].weights, b.stages[k].weights)


def test_objective_is_lebesgue_integral(problem_1d, params_1d):
    stack = synthesize(problem_1d, params_1d)
    stage = stack.stages[0]
    obj = objective_coefficients(stage, problem_1d.xbar)
    assert np.all(obj > 0.0)
    assert np.all(obj <= 1.0)


def test_basis_factory(problem_1d):
    def factory(k, rng):
        return [Grbf([c], [0.05]) for c in np.linspace(-0.9, 0.9, 7)]

    params = SynthesisParams(horizon=3, num_basis=7, epsilon=0.2, beta=0.01)
    stack = synthesize(problem_1d, params, basis_factory=factory)
    np.testing.assert_allclose(stack.stages[0].centers[:, 0], np.linspace(-0.9, 0.9, 7))


def test_num_samples_override(problem_1d):
    params = SynthesisParams(horizon=3, num_basis=5, epsilon=0.2, beta=0.01, num_samples=300)
    stack = synthesize(problem_1d, params)
    assert stack.metadata[0]["N"] == 300
    assert 0.0 < stack.metadata[0]["epsilon"] < 1.0


def test_too_few_samples_is_unbounded(problem_1d):
    params = SynthesisParams(horizon=3, num_basis=6, epsilon=0.2, beta=0.01, num_samples=1)
    with pytest.raises(LpUnboundedError) as info:
        synthesize(problem_1d, params)
    assert info.value.stage == 2
    assert info.value.ray is not None


def test_horizon_mismatch(problem_1d):
    params = SynthesisParams(horizon=2, num_basis=5, epsilon=0.2, beta=0.01)
    with pytest.raises(ValidationError):
        synthesize(problem_1d, params)


def test_empirical_violation_is_small(problem_1d, params_1d):
    stack = synthesize(problem_1d, params_1d)
    for k in range(3):
        fraction = empirical_violation(stack, k, 5000, np.random.default_rng(k))
        assert 0.0 <= fraction <= 0.2 + 0.05


def test_value_stack_needs_all_stages(problem_1d):
    with pytest.raises(ValidationError):
        ValueStack(problem_1d, {})


@pytest.mark.slow
def test_violation_guarantee_2d():
    problem = regulation_problem(2, horizon=5)
    params = SynthesisParams(
        horizon=5,
        num_basis=100,
        epsilon=0.05,
        beta=0.01,
        variance_box=Box([0.02, 0.02], [0.095, 0.095]),
    )
    stack = synthesize(problem, params)
    for k in range(5):
        assert empirical_violation(stack, k, 10000, np.random.default_rng(100 + k)) <= 0.07
