import logging

import numpy as np

from reachadp.exceptions import ValidationError
from reachadp.oracle.grid_dp import GridController, grid_dp
from reachadp.oracle.lqg import lqg_controller
from reachadp.policy.adp_controller import AdpController
from reachadp.policy.rollout import empirical_probability
from reachadp.utils.box import sample_uniform

logger = logging.getLogger(__name__)

BASELINES = ("lqg", "grid", "none")


def uniform_initial_conditions(problem, count, rng):
    """``count`` initial states drawn uniformly from ``K' \\ K``."""
    return sample_uniform(problem.xbar, rng, size=count)


def segment_hits_box(p, q, box):
    """Whether the segment ``[p, q]`` meets the interior of ``box`` (slab test)."""
    p = np.asarray(p, dtype="float64")
    d = np.asarray(q, dtype="float64") - p
    t_lo, t_hi = 0.0, 1.0
    for l in range(box.dim):
        if d[l] == 0.0:
            if not box.lo[l] < p[l] < box.hi[l]:
                return False
            continue
        t1 = (box.lo[l] - p[l]) / d[l]
        t2 = (box.hi[l] - p[l]) / d[l]
        t_lo = max(t_lo, min(t1, t2))
        t_hi = min(t_hi, max(t1, t2))
        if t_lo >= t_hi:
            return False
    return True


def blocked_initial_conditions(problem, count, rng, max_attempts=100_000):
    """
    Initial states from ``K' \\ K`` whose straight path to the center of
    ``K`` crosses at least one obstacle.

    Candidates are drawn uniformly and rejected until ``count`` are found.
    When ``max_attempts`` is exhausted the missing states are plain uniform
    draws, with a warning.
    """
    if problem.obstacles is None or problem.obstacles.is_empty():
        raise ValidationError("Blocked initial conditions need obstacles")
    goal = problem.target.bounding_box().center
    found = []
    attempts = 0
    while len(found) < count and attempts < max_attempts:
        x = sample_uniform(problem.xbar, rng)
        attempts += 1
        if any(segment_hits_box(x, goal, box) for box in problem.obstacles):
            found.append(x)
    if len(found) < count:
        logger.warning(
            "Only %d of %d initial conditions have an obstacle on their path; "
            "drawing the rest uniformly",
            len(found),
            count,
        )
        found.extend(uniform_initial_conditions(problem, count - len(found), rng))
    return np.array(found).reshape(count, problem.state_dim)


def initial_conditions(problem, count, rng, blocked=False):
    """Uniform initial states, or blocked ones (see :func:`blocked_initial_conditions`)."""
    if count < 1:
        raise ValidationError(f"Need at least one initial condition, got {count}")
    if blocked:
        return blocked_initial_conditions(problem, count, rng)
    return uniform_initial_conditions(problem, count, rng)


class EvaluationResult:
    """
    Per-initial-condition comparison of predicted and achieved probabilities.

    Parameters
    ----------
    header : list of strings

    rows : list of lists
        One row per initial condition, then a summary row labelled ``"mean"``.

    value_gap : float
        Mean ``|V_0 - V_ADP|`` over the initial conditions.

    baseline_gap : float or None
        Mean ``|V_ADP - V_baseline|`` when a baseline is evaluated.

    grid_value : GridValue or None
    """

    def __init__(self, header, rows, value_gap, baseline_gap=None, grid_value=None):
        self.header = header
        self.rows = rows
        self.value_gap = value_gap
        self.baseline_gap = baseline_gap
        self.grid_value = grid_value


def make_baseline(problem, baseline, grid_resolution=100, control_resolution=21):
    """
    Baseline controller and its column label.

    Returns
    -------
    controller : Controller or None

    label : string or None

    grid_value : GridValue or None
    """
    if baseline == "none":
        return None, None, None
    if baseline == "lqg":
        return lqg_controller(problem), "LQG", None
    if baseline == "grid":
        grid_value = grid_dp(problem, grid_resolution, control_resolution)
        return GridController(grid_value, problem.control_box), "grid", grid_value
    raise ValidationError(f'baseline "{baseline}" not recognized, use one of {BASELINES}')


def evaluate_stack(
    stack,
    x0s,
    runs,
    seed=0,
    baseline="lqg",
    grid_resolution=100,
    control_resolution=21,
    n_starts=10,
    workers=1,
):
    """
    Compare the predicted value with the empirical success probability of
    the ADP controller (and of a baseline) from each initial state.

    Controllers share noise: run ``r`` from initial state ``i`` uses the
    stream derived from ``(seed, i, r)`` for every controller.

    Parameters
    ----------
    stack : ValueStack

    x0s : ndarray of floats, shape ``(P, n)``

    runs : int
        Trajectories per initial state.

    seed : int

    baseline : string
        ``"lqg"``, ``"grid"`` or ``"none"``.

    grid_resolution, control_resolution : int
        Resolutions of the grid baseline.

    n_starts : int
        Uniform starts of the ADP control optimization.

    workers : int
        Threads simulating the runs.

    Returns
    -------
    result : EvaluationResult
    """
    problem = stack.problem
    x0s = np.atleast_2d(np.asarray(x0s, dtype="float64"))
    adp = AdpController(stack, seed=seed, n_starts=n_starts)
    base, label, grid_value = make_baseline(problem, baseline, grid_resolution, control_resolution)

    header = ["row"] + [f"x0_{l + 1}" for l in range(problem.state_dim)]
    header += ["V0~", "V_ADP", "se_ADP", "|V0~-V_ADP|"]
    if base is not None:
        header += [f"V_{label}", f"se_{label}", f"|V_ADP-V_{label}|"]
    if grid_value is not None:
        header += ["V0_grid", "|V0_grid-V_ADP|"]

    rows = []
    value_gaps, baseline_gaps = [], []
    predicted = stack.evaluate(0, x0s)
    if np.any(predicted > 1.0):
        logger.warning(
            "The approximate value exceeds 1 at %d of %d initial conditions",
            int(np.sum(predicted > 1.0)),
            len(x0s),
        )
    for i, x0 in enumerate(x0s):
        v_adp, se_adp = empirical_probability(problem, adp, x0, runs, seed=seed, key=i, workers=workers)
        gap = abs(predicted[i] - v_adp)
        value_gaps.append(gap)
        row = [i, *x0, predicted[i], v_adp, se_adp, gap]
        if base is not None:
            v_base, se_base = empirical_probability(
                problem, base, x0, runs, seed=seed, key=i, workers=workers
            )
            baseline_gaps.append(abs(v_adp - v_base))
            row += [v_base, se_base, abs(v_adp - v_base)]
        if grid_value is not None:
            v_grid = grid_value.evaluate(0, x0)
            row += [v_grid, abs(v_grid - v_adp)]
        rows.append(row)
        logger.debug("Initial condition %d: V0~=%.4f V_ADP=%.4f", i, predicted[i], v_adp)

    value_gap = float(np.mean(value_gaps))
    baseline_gap = float(np.mean(baseline_gaps)) if baseline_gaps else None
    summary = ["mean"] + [""] * (problem.state_dim + 3) + [value_gap]
    if base is not None:
        summary += ["", "", baseline_gap]
    if grid_value is not None:
        summary += ["", float(np.mean([r[-1] for r in rows]))]
    rows.append(summary)
    logger.info(
        "Mean |V0~-V_ADP| = %.4f%s",
        value_gap,
        "" if baseline_gap is None else f", mean |V_ADP-V_{label}| = {baseline_gap:.4f}",
    )
    return EvaluationResult(header, rows, value_gap, baseline_gap, grid_value)
