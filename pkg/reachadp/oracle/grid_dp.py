import logging

import numpy as np

from reachadp.basis import gaussian_interval_mass
from reachadp.exceptions import UnsupportedError, ValidationError
from reachadp.policy.controller import Controller
from reachadp.problem import IN_TARGET, IN_XBAR
from reachadp.utils.grid import CellGrid

logger = logging.getLogger(__name__)

MAX_STATE_DIM = 3
# Upper bound on the number of floats held by one block of cells
_CHUNK_FLOATS = 4_000_000


class GridValue:
    """
    Reach-avoid value functions on a regular state grid.

    Parameters
    ----------
    grid : CellGrid

    controls : ndarray of floats, shape ``(C, m)``
        The finite control set.

    values : list of ndarrays
        ``values[k]`` has shape ``grid.shape``, for ``k = 0 ... T``.

    policy : list of ndarrays of ints
        ``policy[k]`` holds, per cell, the index of the maximizing control,
        for ``k = 0 ... T-1``.

    control_resolution : tuple of int
    """

    def __init__(self, grid, controls, values, policy, control_resolution):
        self.grid = grid
        self.controls = controls
        self.values = values
        self.policy = policy
        self.control_resolution = control_resolution

    @property
    def horizon(self):
        return len(self.values) - 1

    @property
    def state_resolution(self):
        return self.grid.npoints

    def evaluate(self, k, x):
        """Value of stage ``k`` at ``x``, constant on each cell, 0 outside the grid."""
        return self.grid.lookup(self.values[k], x)

    def to_rows(self, k):
        """Cell centers and values of stage ``k``, one row per cell."""
        return np.column_stack([self.grid.points(), np.ravel(self.values[k])])


def _control_grid(box, resolution):
    resolution = np.broadcast_to(np.asarray(resolution, dtype=int), (box.dim,))
    if np.any(resolution < 1):
        raise ValidationError(f"Control resolution must be positive, got {resolution}")
    axes = [
        np.linspace(lo, hi, r) if r > 1 else np.array([0.5 * (lo + hi)])
        for lo, hi, r in zip(box.lo, box.hi, resolution)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1), tuple(int(r) for r in resolution)


def _expected_next(grid, kernel, points, controls, value):
    """
    ``sum_j alpha_j sum_cells P_j(cell | x, u) value[cell]`` for every point and control.

    Each cell mass factorizes over the axes, so the sum is a sequence of
    one-axis contractions.
    """
    n_points = points.shape[0]
    n_controls = controls.shape[0]
    X = np.repeat(points, n_controls, axis=0)
    U = np.tile(controls, (n_points, 1))
    means = kernel.means(X, U)  # (P*C, J, n)
    out = np.zeros(n_points * n_controls)
    for j in range(kernel.n_components):
        masses = [
            gaussian_interval_mass(
                e[np.newaxis, :-1],
                e[np.newaxis, 1:],
                means[:, j, l, np.newaxis],
                kernel.variances[j, l],
            )
            for l, e in enumerate(grid.edges)
        ]
        # contract the first axis with a batch index, then the remaining ones
        contracted = np.tensordot(masses[0], value, axes=([1], [0]))
        for l in range(1, grid.dim):
            contracted = np.einsum("bi,bi...->b...", masses[l], contracted)
        out += kernel.weights[j] * contracted
    return out.reshape(n_points, n_controls)


def grid_dp(problem, state_resolution, control_resolution):
    """
    Reach-avoid dynamic programming on a grid.

    The value is taken constant on each cell of a regular grid over the
    state box; the transition integral is the exact kernel mass of each
    cell, and mass leaving the state box counts as failure. The supremum
    over controls is taken on a regular control grid (endpoints included).

    Parameters
    ----------
    problem : ReachAvoidProblem
        State dimension at most 3.

    state_resolution : int or list of int
        Cells per state dimension.

    control_resolution : int or list of int
        Grid points per control dimension.

    Returns
    -------
    grid_value : GridValue
    """
    if problem.state_dim > MAX_STATE_DIM:
        raise UnsupportedError(
            f"Grid dynamic programming supports up to {MAX_STATE_DIM} state dimensions, "
            f"got {problem.state_dim}"
        )
    grid = CellGrid(problem.state_box, state_resolution)
    controls, control_res = _control_grid(problem.control_box, control_resolution)
    points = grid.points()
    region = problem.classify(points)
    in_target = region == IN_TARGET
    in_xbar = np.flatnonzero(region == IN_XBAR)

    per_point = controls.shape[0] * (grid.size // grid.npoints[0] + sum(grid.npoints))
    chunk = max(1, _CHUNK_FLOATS // max(per_point, 1))

    value = np.where(in_target, 1.0, 0.0).reshape(grid.shape)
    values = [value]
    policy = []
    for k in range(problem.horizon - 1, -1, -1):
        flat = np.where(in_target, 1.0, 0.0)
        best = np.zeros(grid.size, dtype=int)
        for start in range(0, in_xbar.size, chunk):
            cells = in_xbar[start:start + chunk]
            expected = _expected_next(grid, problem.kernel, points[cells], controls, value)
            best[cells] = np.argmax(expected, axis=1)
            flat[cells] = np.clip(expected[np.arange(cells.size), best[cells]], 0.0, 1.0)
        value = flat.reshape(grid.shape)
        values.append(value)
        policy.append(best)
        logger.debug("Grid stage %d: max value %.6f", k, value.max())

    values.reverse()
    policy.reverse()
    return GridValue(grid, controls, values, policy, control_res)


class GridController(Controller):
    """
    Derived class applying the maximizing grid control of the cell containing the state.

    Parameters
    ----------
    grid_value : GridValue

    control_box : Box
    """

    kind = "grid"

    def __init__(self, grid_value, control_box):
        super().__init__(control_box)
        self.grid_value = grid_value

    def _act(self, k, x):
        cell = int(self.grid_value.grid.locate(x)[0])
        if cell < 0:
            return self.control_box.center.copy()
        return self.grid_value.controls[self.grid_value.policy[k][cell]]
