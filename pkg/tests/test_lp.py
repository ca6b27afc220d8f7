# -*- coding: utf-8 -*-

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from reachadp.basis import GrbfStage
from reachadp.bellman import ValueFunction
from reachadp.exceptions import NumericalError, StageStateError, ValidationError
from reachadp.lp import LpInstance, assemble, read_lp, solve, write_lp
from reachadp.lp.instance import INFEASIBLE, UNBOUNDED
from reachadp.lp.lp_text import from_text, to_text
from reachadp.scenario import draw_scenarios


def random_bounded_lp(rng, n_vars, n_rows):
    # c in the cone of the rows keeps the LP bounded; b below Phi w0 keeps it feasible
    phi = rng.normal(size=(n_rows, n_vars))
    c = phi.T @ rng.uniform(0.1, 1.0, n_rows)
    w0 = rng.normal(size=n_vars)
    b = phi @ w0 - rng.uniform(0.0, 1.0, n_rows)
    return LpInstance(c, phi, b)


def vertex_enumeration(lp):
    best = np.inf
    for rows in itertools.combinations(range(lp.n_rows), lp.n_vars):
        sub = lp.phi[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        w = np.linalg.solve(sub, lp.b[list(rows)])
        if np.all(lp.phi @ w >= lp.b - 1e-9):
            best = min(best, float(lp.c @ w))
    return best


def test_against_vertex_enumeration(rng):
    for _ in range(200):
        n_vars = int(rng.integers(1, 5))
        n_rows = int(rng.integers(n_vars + 1, 13))
        lp = random_bounded_lp(rng, n_vars, n_rows)
        solution = solve(lp)
        assert solution.solved
        expected = vertex_enumeration(lp)
        assert solution.objective == pytest.approx(expected, abs=1e-8 * max(1.0, abs(expected)))


def test_against_linprog_and_certificates(rng):
    lp = random_bounded_lp(rng, 10, 200)
    solution = solve(lp)
    reference = linprog(lp.c, A_ub=-lp.phi, b_ub=-lp.b, bounds=[(None, None)] * 10, method="highs")
    assert reference.status == 0
    assert solution.objective == pytest.approx(reference.fun, rel=1e-8, abs=1e-8)
    report = solution.certificates(lp)
    assert report["min_slack"] >= -1e-8
    assert abs(report["complementarity"]) <= 1e-8 * (1 + abs(solution.objective))
    assert report["gap"] <= 1e-6 * (1 + abs(solution.objective))
    assert np.all(solution.duals >= 0.0)


def test_single_variable():
    lp = LpInstance([1.0], [[1.0], [2.0]], [2.0, 2.0])
    solution = solve(lp)
    assert solution.solved
    assert solution.w[0] == pytest.approx(2.0)
    assert solution.objective == pytest.approx(2.0)


def test_unbounded_ray():
    # One row cannot bound two free weights
    lp = LpInstance([1.0, 2.0], [[1.0, 1.0]], [1.0])
    solution = solve(lp)
    assert solution.status == UNBOUNDED
    d = solution.ray
    assert np.all(lp.phi @ d >= -1e-7)
    assert lp.c @ d < 0.0


def test_unbounded_ray_random(rng):
    for _ in range(20):
        phi = np.abs(rng.normal(size=(3, 5)))
        lp = LpInstance(rng.uniform(0.1, 1.0, 5), phi, rng.uniform(0, 1, 3))
        solution = solve(lp)
        assert solution.status == UNBOUNDED
        assert np.all(lp.phi @ solution.ray >= -1e-7)
        assert lp.c @ solution.ray < 0.0


def test_infeasible():
    lp = LpInstance([1.0], [[1.0], [-1.0]], [1.0, 0.0])
    assert solve(lp).status == INFEASIBLE


def test_scaling_invariance(rng):
    lp = random_bounded_lp(rng, 6, 40)
    base = solve(lp)
    doubled = solve(lp.scaled(2.0))
    np.testing.assert_array_equal(base.w, doubled.w)
    assert doubled.objective == 2.0 * base.objective
    other = solve(lp.scaled(3.0))
    np.testing.assert_allclose(other.w, base.w, rtol=1e-9, atol=1e-12)


def test_iteration_cap():
    lp = LpInstance([1.0], [[1.0], [2.0]], [2.0, 2.0])
    with pytest.raises(NumericalError):
        solve(lp, max_iter=0)


def test_instance_validation():
    with pytest.raises(ValidationError):
        LpInstance([1.0], np.zeros((0, 1)), [])
    with pytest.raises(ValidationError):
        LpInstance([1.0, 2.0], [[1.0]], [1.0])
    with pytest.raises(ValidationError):
        LpInstance([1.0], [[np.nan]], [1.0])


def test_text_round_trip(rng, tmp_path):
    lp = random_bounded_lp(rng, 3, 7)
    path = tmp_path / "stage.lp"
    write_lp(lp, path)
    assert read_lp(path) == lp
    assert to_text(from_text(path.read_text())) == path.read_text()


def test_text_rejects_garbage():
    with pytest.raises(ValidationError):
        from_text("minimize\n")


def test_assemble_rows_and_workers(problem_1d, rng):
    stage = GrbfStage.from_arrays(rng.uniform(-1, 1, (4, 1)), rng.uniform(0.02, 0.1, (4, 1)), k=2)
    scenarios = draw_scenarios(problem_1d, 50, rng)
    prev = ValueFunction.terminal(problem_1d)
    obj = stage.box_integrals(problem_1d.xbar)
    lp = assemble(stage, scenarios, prev, problem_1d.kernel, obj)
    assert lp.phi.shape == (50, 4)
    np.testing.assert_allclose(
        lp.b,
        problem_1d.kernel.union_probability(scenarios.states, scenarios.controls, problem_1d.target),
        rtol=1e-12,
    )
    threaded = assemble(stage, scenarios, prev, problem_1d.kernel, obj, workers=3)
    np.testing.assert_array_equal(threaded.b, lp.b)
    stage.set_weights(np.ones(4))
    with pytest.raises(StageStateError):
        assemble(stage, scenarios, prev, problem_1d.kernel, obj)


def test_redundant_rows_leave_the_optimum(rng):
    for _ in range(20):
        lp = random_bounded_lp(rng, 4, 12)
        # A copy of a row and a slack combination of two rows are implied constraints
        extra_phi = np.vstack([lp.phi[3], lp.phi[0] + lp.phi[1]])
        extra_b = np.array([lp.b[3], lp.b[0] + lp.b[1] - 0.5])
        padded = LpInstance(lp.c, np.vstack([lp.phi, extra_phi]), np.concatenate([lp.b, extra_b]))
        base = solve(lp)
        solution = solve(padded)
        assert solution.solved
        assert solution.objective == pytest.approx(base.objective, rel=1e-9, abs=1e-9)
        assert np.all(padded.phi @ solution.w >= padded.b - 1e-8)
