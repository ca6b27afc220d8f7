# -*- coding: utf-8 -*-

import time

import numpy as np
import pytest
from scipy import stats

from reachadp.exceptions import DomainError, ValidationError
from reachadp.scenario import (
    ScenarioParams,
    analytic_sample_bound,
    binomial_tail,
    draw_scenarios,
    implied_epsilon,
    linear_sample_count,
    required_samples,
    sample_bound,
)


@pytest.mark.parametrize("n, eps, m", [(50, 0.1, 3), (400, 0.05, 10), (3960, 0.05, 100)])
def test_binomial_tail_matches_cdf(n, eps, m):
    assert binomial_tail(n, eps, m) == pytest.approx(stats.binom.cdf(m - 1, n, eps), rel=1e-9, abs=1e-300)


def test_binomial_tail_small_n():
    assert binomial_tail(5, 0.1, 10) == 1.0


@pytest.mark.parametrize("m", [1, 2, 10, 100])
def test_sample_bound_is_minimal(m):
    params = ScenarioParams(0.05, 0.01, m)
    n = sample_bound(params)
    assert binomial_tail(n, 0.05, m) <= 0.01
    assert binomial_tail(n - 1, 0.05, m) > 0.01
    assert n <= analytic_sample_bound(params)


def test_sample_bound_single_variable():
    # (1 - eps)^N <= beta
    n = sample_bound(ScenarioParams(0.05, 0.01, 1))
    assert n == int(np.ceil(np.log(0.01) / np.log(0.95)))


def test_sample_bound_monotone():
    n_eps = [sample_bound(ScenarioParams(eps, 0.01, 20)) for eps in (0.2, 0.1, 0.05)]
    n_beta = [sample_bound(ScenarioParams(0.05, beta, 20)) for beta in (0.1, 0.01, 0.001)]
    n_m = [sample_bound(ScenarioParams(0.05, 0.01, m)) for m in (10, 20, 40)]
    for counts in (n_eps, n_beta, n_m):
        assert counts == sorted(counts)


@pytest.mark.parametrize("m, expected", [(100, 3960), (500, 19960), (1000, 39960)])
def test_linear_sample_counts(m, expected):
    params = ScenarioParams(0.05, 0.01, m)
    assert linear_sample_count(params) == expected
    assert required_samples(params, "linear") == expected


@pytest.mark.parametrize("m", [100, 500, 1000])
def test_sample_bound_is_fast(m):
    t0 = time.perf_counter()
    n = sample_bound(ScenarioParams(0.05, 0.01, m))
    assert time.perf_counter() - t0 < 1.0
    # The exact bound is below the linear count
    assert n < linear_sample_count(ScenarioParams(0.05, 0.01, m))


def test_implied_epsilon_inverts_sample_bound():
    params = ScenarioParams(0.05, 0.01, 20)
    n = sample_bound(params)
    eps = implied_epsilon(n, 0.01, 20)
    assert eps <= 0.05 + 1e-9
    assert binomial_tail(n, eps, 20) <= 0.01
    assert implied_epsilon(10, 0.01, 20) == 1.0


def test_params_validation():
    with pytest.raises(ValidationError):
        ScenarioParams(0.0, 0.01, 10)
    with pytest.raises(ValidationError):
        ScenarioParams(0.05, 1.0, 10)
    with pytest.raises(ValidationError):
        ScenarioParams(0.05, 0.01, 0)
    with pytest.raises(ValidationError):
        required_samples(ScenarioParams(0.05, 0.01, 10), "quadratic")


def test_draw_scenarios_uniform(problem_2d, rng):
    scenarios = draw_scenarios(problem_2d, 5000, rng, seed=7)
    assert len(scenarios) == 5000
    assert scenarios.seed == 7
    assert np.all(problem_2d.xbar.contains(scenarios.states))
    assert not np.any(problem_2d.target.interior_contains(scenarios.states))
    assert np.all(problem_2d.control_box.contains(scenarios.controls))


def test_draw_scenarios_is_reproducible(problem_2d):
    a = draw_scenarios(problem_2d, 10, np.random.default_rng(1))
    b = draw_scenarios(problem_2d, 10, np.random.default_rng(1))
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.controls, b.controls)


def test_draw_scenarios_custom_sampler(problem_1d, rng):
    def sampler(rng, n):
        return np.full((n, 1), 0.5), np.zeros((n, 1))

    scenarios = draw_scenarios(problem_1d, 3, rng, sampler=sampler)
    np.testing.assert_array_equal(scenarios.states, [[0.5]] * 3)


def test_draw_scenarios_needs_samples(problem_1d, rng):
    with pytest.raises(ValidationError):
        draw_scenarios(problem_1d, 0, rng)


def test_domain_error_is_a_value_error():
    assert issubclass(DomainError, ValueError)


def test_draw_scenarios_ks_uniformity(problem_1d, rng):
    scenarios = draw_scenarios(problem_1d, 100000, rng)
    x = scenarios.states[:, 0]

    def cdf(t):
        # uniform law on [-1, -0.1] U [0.1, 1]
        return np.where(t <= -0.1, (t + 1.0) / 1.8, 0.5 + (np.maximum(t, 0.1) - 0.1) / 1.8)

    assert stats.kstest(x, cdf).pvalue > 0.01
    assert stats.kstest(scenarios.controls[:, 0], stats.uniform(-0.1, 0.2).cdf).pvalue > 0.01
