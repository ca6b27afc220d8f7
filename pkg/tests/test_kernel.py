# -*- coding: utf-8 -*-

import numpy as np
import pytest

from reachadp.exceptions import ValidationError
from reachadp.kernels import AffineMeanMap, FunctionMeanMap, GaussianMixtureKernel
from reachadp.utils.box import Box, BoxUnion, subtract


@pytest.fixture(scope="function")
def mixture():
    # Two components sharing A, B with different shifts and variances
    A = np.array([[1.0, 0.1], [0.0, 0.9]])
    B = np.eye(2)
    return GaussianMixtureKernel.affine(
        A, B, [(0.3, [0.05, 0.0], [0.01, 0.02]), (0.7, [-0.05, 0.0], [0.02, 0.01])]
    )


def test_weights_must_sum_to_one():
    with pytest.raises(ValidationError):
        GaussianMixtureKernel.affine(np.eye(1), np.eye(1), [(0.5, None, 0.1), (0.4, None, 0.1)])


def test_affine_map_shapes():
    with pytest.raises(ValidationError):
        AffineMeanMap(np.eye(2), np.ones((3, 1)))
    mm = AffineMeanMap(np.eye(2), np.ones((2, 1)), offset=[1.0, 2.0])
    np.testing.assert_allclose(mm.evaluate(np.array([1.0, 1.0]), np.array([0.5])), [2.5, 3.5])


def test_means_shape(mixture, rng):
    x = rng.uniform(-1, 1, (7, 2))
    u = rng.uniform(-0.1, 0.1, (7, 2))
    assert mixture.means(x, u).shape == (7, 2, 2)


def test_sample_next_statistics(mixture, rng):
    x = np.array([0.2, -0.3])
    u = np.array([0.05, 0.05])
    samples = np.array([mixture.sample_next(x, u, rng) for _ in range(20000)])
    means = mixture.means(x, u)
    expected_mean = mixture.weights @ means
    second = mixture.weights @ (mixture.variances + means**2)
    expected_var = second - expected_mean**2
    se = np.sqrt(expected_var / len(samples))
    assert np.all(np.abs(samples.mean(axis=0) - expected_mean) < 4 * se)
    assert np.allclose(samples.var(axis=0), expected_var, rtol=0.05)


def test_sample_next_consumes_fixed_variates(mixture):
    # One uniform and n normals per call, whatever the component
    rng_a = np.random.default_rng(3)
    rng_b = np.random.default_rng(3)
    mixture.sample_next(np.zeros(2), np.zeros(2), rng_a)
    rng_b.random()
    rng_b.standard_normal(2)
    assert rng_a.random() == rng_b.random()


def test_box_probability_against_monte_carlo(mixture, rng):
    x = np.array([0.0, 0.0])
    u = np.array([0.05, -0.05])
    box = Box([-0.1, -0.2], [0.2, 0.1])
    p = mixture.box_probability(x, u, box)
    y = mixture.sample_next_batch(np.tile(x, (200000, 1)), np.tile(u, (200000, 1)), rng)
    p_mc = np.mean(box.contains(y))
    assert abs(p - p_mc) < 4 * np.sqrt(p * (1 - p) / 200000)


def test_union_probability_adds_up(mixture):
    x = np.array([0.1, 0.1])
    u = np.zeros(2)
    left = Box([-1, -1], [0.1, 1])
    right = Box([0.1, -1], [1, 1])
    total = mixture.union_probability(x, u, BoxUnion([left, right]))
    assert total == pytest.approx(
        mixture.box_probability(x, u, left) + mixture.box_probability(x, u, right), rel=1e-13
    )


def test_function_mean_map():
    mm = FunctionMeanMap(lambda x, u: np.sin(x) + u, state_dim=1, control_dim=1)
    kernel = GaussianMixtureKernel([1.0], [mm], [[0.01]])
    assert not kernel.is_affine
    np.testing.assert_allclose(kernel.means(np.array([0.5]), np.array([0.1]))[0], [np.sin(0.5) + 0.1])


def test_partition_probabilities_sum_to_one(mixture, rng):
    # [-10, 10]^2 holds all but a negligible tail of the mass
    whole = Box([-10.0, -10.0], [10.0, 10.0])
    target = Box([-0.1, -0.1], [0.1, 0.1])
    ring = subtract(whole, target)
    x = rng.uniform(-1.0, 1.0, (50, 2))
    u = rng.uniform(-0.1, 0.1, (50, 2))
    total = mixture.union_probability(x, u, ring) + mixture.box_probability(x, u, target)
    np.testing.assert_allclose(total, 1.0, atol=1e-9)


def test_probability_far_outside_is_negligible(problem_1d):
    # Mean at 2.0 is ten standard deviations beyond the safe set [-1, 1]
    p = problem_1d.kernel.union_probability(np.array([2.0]), np.array([0.0]), problem_1d.safe)
    assert 0.0 <= p < 1e-20
