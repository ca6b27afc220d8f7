import math

import numpy as np
from scipy.special import logsumexp

from reachadp.exceptions import DomainError, ValidationError
from reachadp.utils.box import sample_uniform

SAMPLE_RULES = ("exact", "linear")

# Absorbs rounding in 2 (M - 1) / eps before the ceiling
CEIL_TOL = 1e-9


class ScenarioParams:
    """
    Violation level, confidence parameter and decision dimension of a stage LP.

    Parameters
    ----------
    epsilon : float in (0, 1)
        Admissible violation probability.

    beta : float in (0, 1)
        The guarantee holds with confidence ``1 - beta``.

    n_decision : int
        Number of decision variables ``M`` (basis elements).
    """

    def __init__(self, epsilon, beta, n_decision):
        if not 0.0 < epsilon < 1.0:
            raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
        if not 0.0 < beta < 1.0:
            raise ValidationError(f"beta must lie in (0, 1), got {beta}")
        if int(n_decision) != n_decision or n_decision < 1:
            raise ValidationError(f"The decision dimension must be a positive integer, got {n_decision}")
        self.epsilon = float(epsilon)
        self.beta = float(beta)
        self.n_decision = int(n_decision)

    def __repr__(self):
        return (
            f"ScenarioParams(epsilon={self.epsilon}, beta={self.beta}, "
            f"n_decision={self.n_decision})"
        )


class ScenarioSet:
    """
    Sampled state/control pairs at which a stage LP enforces its constraints.

    Parameters
    ----------
    states : ndarray of floats, shape ``(N, n)``

    controls : ndarray of floats, shape ``(N, m)``

    seed : int or None
        Seed of the generator that drew the pairs, kept for the record.
    """

    def __init__(self, states, controls, seed=None):
        states = np.atleast_2d(np.asarray(states, dtype="float64"))
        controls = np.atleast_2d(np.asarray(controls, dtype="float64"))
        if states.shape[0] != controls.shape[0]:
            raise ValidationError("States and controls must have the same number of rows")
        self.states = states
        self.controls = controls
        self.seed = seed

    def __len__(self):
        return self.states.shape[0]

    def __iter__(self):
        return iter(zip(self.states, self.controls))


def binomial_tail(n_samples, epsilon, n_decision):
    """
    ``sum_{i=0}^{M-1} C(N, i) eps^i (1 - eps)^(N - i)``.

    The terms are built with the ratio of successive terms in log space and
    summed with ``logsumexp``, which stays finite for large ``N`` and ``M``.
    """
    if n_samples < n_decision:
        return 1.0
    log_ratio = math.log(epsilon) - math.log1p(-epsilon)
    log_terms = np.empty(n_decision)
    log_terms[0] = n_samples * math.log1p(-epsilon)
    for i in range(n_decision - 1):
        log_terms[i + 1] = (
            log_terms[i] + math.log(n_samples - i) - math.log(i + 1) + log_ratio
        )
    return float(min(1.0, math.exp(logsumexp(log_terms))))


def sample_bound(params):
    """
    Smallest ``N`` whose binomial tail (see :func:`binomial_tail`) is at most ``beta``.

    The tail decreases with ``N``, so the bound is bracketed by doubling
    from ``N = M`` and then located by bisection. The benchmark sample
    counts come from the ``"linear"`` rule, see :func:`linear_sample_count`.

    Parameters
    ----------
    params : ScenarioParams

    Returns
    -------
    n_samples : int
    """
    eps, beta, m = params.epsilon, params.beta, params.n_decision
    hi = m
    while binomial_tail(hi, eps, m) > beta:
        hi *= 2
    lo = max(hi // 2, m - 1)
    # invariant: tail(lo) > beta >= tail(hi), except when hi == m
    if hi == m:
        lo = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if binomial_tail(mid, eps, m) <= beta:
            hi = mid
        else:
            lo = mid
    return max(hi, 1)


def linear_sample_count(params):
    """
    ``ceil(2 (M - 1) / eps)``: the sample count used by the regulation
    benchmarks (3960, 19960 and 39960 for ``eps = 0.05`` and ``M = 100, 500,
    1000``). It ignores ``beta`` and is larger than :func:`sample_bound` for
    those settings.
    """
    return max(1, math.ceil(2.0 * (params.n_decision - 1) / params.epsilon - CEIL_TOL))


def analytic_sample_bound(params):
    """Closed-form upper bound ``(2/eps) (ln(1/beta) + M)`` on :func:`sample_bound`."""
    return 2.0 / params.epsilon * (math.log(1.0 / params.beta) + params.n_decision)


def implied_epsilon(n_samples, beta, n_decision, tol=1e-12):
    """
    Smallest violation level guaranteed by ``n_samples`` scenarios at
    confidence ``1 - beta``, i.e. the smallest ``eps`` with
    ``binomial_tail(n_samples, eps, M) <= beta``. Returns 1.0 when
    ``n_samples < M``.
    """
    if n_samples < n_decision:
        return 1.0
    lo, hi = 0.0, 1.0
    # the tail decreases in eps
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid > 0.0 and binomial_tail(n_samples, mid, n_decision) <= beta:
            hi = mid
        else:
            lo = mid
    return hi


def required_samples(params, rule="exact"):
    """Number of scenarios for a stage, by ``rule`` (``"exact"`` or ``"linear"``)."""
    if rule == "exact":
        return sample_bound(params)
    elif rule == "linear":
        return linear_sample_count(params)
    raise ValidationError(f'sample rule "{rule}" not recognized')


def draw_scenarios(problem, n, rng, sampler=None, seed=None):
    """
    Draw ``n`` independent state/control pairs.

    States are uniform on ``K' \\ K`` and controls uniform on the control
    box, unless a custom ``sampler`` is given.

    Parameters
    ----------
    problem : ReachAvoidProblem

    n : int
        Number of pairs, at least 1.

    rng : numpy.random.Generator

    sampler : callable (optional)
        ``sampler(rng, n) -> (states, controls)`` replacing the uniform measure.

    seed : int (optional)
        Recorded in the returned set.

    Returns
    -------
    scenarios : ScenarioSet
    """
    if n < 1:
        raise ValidationError(f"Need at least one scenario, got {n}")
    if sampler is not None:
        states, controls = sampler(rng, n)
        return ScenarioSet(states, controls, seed)
    if problem.xbar.volume() <= 0.0:
        raise DomainError("K' \\ K is empty; there is nothing to sample")
    states = sample_uniform(problem.xbar, rng, size=n)
    controls = sample_uniform(problem.control_box, rng, size=n)
    return ScenarioSet(states, controls, seed)
