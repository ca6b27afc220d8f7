import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from reachadp.exceptions import ValidationError
from reachadp.problem import IN_TARGET, OUTSIDE_SAFE
from reachadp.utils import seeding

logger = logging.getLogger(__name__)

SUCCESS = "success"
UNSAFE_EXIT = "unsafe-exit"
TIMEOUT = "timeout"


class RolloutResult:
    """
    One simulated trajectory.

    Parameters
    ----------
    trajectory : ndarray of floats, shape ``(tau + 1, n)``
        States ``x_0 ... x_tau`` up to the stopping time.

    outcome : string
        ``"success"``, ``"unsafe-exit"`` or ``"timeout"``.

    hitting_time : int or None
        Step at which ``K`` was entered or ``K'`` left; ``None`` on timeout.
    """

    def __init__(self, trajectory, outcome, hitting_time):
        self.trajectory = np.asarray(trajectory)
        self.outcome = outcome
        self.hitting_time = hitting_time

    @property
    def success(self):
        return self.outcome == SUCCESS

    def __repr__(self):
        return f"RolloutResult(outcome={self.outcome!r}, hitting_time={self.hitting_time})"


def rollout(problem, ctrl, x0, rng):
    """
    Simulate the closed loop from ``x0`` for at most ``T`` steps.

    The episode stops at the first state in ``K`` (success) or outside
    ``K'`` (unsafe exit); the controller is never consulted afterwards.
    ``x0`` in ``K`` is an immediate success.

    Parameters
    ----------
    problem : ReachAvoidProblem

    ctrl : Controller or callable ``(k, x) -> u``

    x0 : ndarray of floats, shape ``(n,)``

    rng : numpy.random.Generator
        Noise source; each step consumes the same number of variates.

    Returns
    -------
    result : RolloutResult
    """
    x = np.array(x0, dtype="float64").reshape(-1)
    if x.size != problem.state_dim:
        raise ValidationError(f"Initial state of size {x.size} for a {problem.state_dim}D problem")
    trajectory = [x]
    for t in range(problem.horizon + 1):
        region = problem.classify(x)
        if region == IN_TARGET:
            return RolloutResult(trajectory, SUCCESS, t)
        if region == OUTSIDE_SAFE:
            return RolloutResult(trajectory, UNSAFE_EXIT, t)
        if t == problem.horizon:
            break
        u = ctrl(t, x)
        x = problem.kernel.sample_next(x, u, rng)
        trajectory.append(x)
    return RolloutResult(trajectory, TIMEOUT, None)


def empirical_probability(problem, ctrl, x0, runs, rng=None, seed=0, key=0, workers=1):
    """
    Monte-Carlo estimate of the reach-avoid probability of a controller.

    Run ``r`` draws its noise from a generator derived from
    ``(seed, key, r)``, so controllers evaluated with the same seed and key
    see the same noise sequences.

    Parameters
    ----------
    problem : ReachAvoidProblem

    ctrl : Controller

    x0 : ndarray of floats

    runs : int
        Number of trajectories, at least 1.

    rng : numpy.random.Generator (optional)
        When given, the seed is drawn from it.

    seed : int (optional)

    key : int (optional)
        Distinguishes initial conditions sharing a seed.

    workers : int (optional)
        Threads simulating the runs.

    Returns
    -------
    probability : float

    standard_error : float
        Binomial standard error ``sqrt(p (1 - p) / runs)``.
    """
    if runs < 1:
        raise ValidationError(f"Need at least one run, got {runs}")
    if rng is not None:
        seed = int(rng.integers(2**62))

    def one_run(r):
        run_rng = seeding.derive_rng(seed, seeding.ROLLOUT, key, r)
        return rollout(problem, ctrl, x0, run_rng).success

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one_run, range(runs)))
    else:
        outcomes = [one_run(r) for r in range(runs)]
    p = float(np.mean(outcomes))
    logger.debug("%s controller: %d/%d successful runs", getattr(ctrl, "kind", "user"), sum(outcomes), runs)
    return p, float(np.sqrt(p * (1.0 - p) / runs))
