import logging
import time

import numpy as np

from reachadp.basis import Grbf, GrbfStage
from reachadp.bellman import ValueFunction, apply
from reachadp.exceptions import (
    LpUnboundedError,
    NumericalError,
    ValidationError,
)
from reachadp.lp.instance import INFEASIBLE, UNBOUNDED, assemble
from reachadp.lp.simplex import FEASIBILITY_TOL, solve
from reachadp.scenario import (
    SAMPLE_RULES,
    ScenarioParams,
    draw_scenarios,
    implied_epsilon,
    required_samples,
)
from reachadp.utils import seeding
from reachadp.utils.box import Box, sample_uniform

logger = logging.getLogger(__name__)


def _per_stage(value, horizon, name, cast):
    if np.ndim(value) == 0:
        return [cast(value)] * horizon
    values = [cast(v) for v in value]
    if len(values) != horizon:
        raise ValidationError(f"{name} needs {horizon} entries (one per stage), got {len(values)}")
    return values


def default_variance_box(problem):
    """
    Variance sampling box ``[(0.02 r_l)^2, (0.1 r_l)^2]`` per dimension, with
    ``r`` the half-widths of the bounding box of ``K' \\ K``.
    """
    r = problem.xbar.bounding_box().half_widths
    return Box((0.02 * r) ** 2, (0.1 * r) ** 2)


class SynthesisParams:
    """
    Design parameters of the value function synthesis.

    Parameters
    ----------
    horizon : int
        Number of stages ``T``.

    num_basis : int or list of int
        Basis elements ``M_k`` per stage; a scalar is used for every stage.
        Lists are indexed by ``k = 0 ... T-1``.

    epsilon, beta : float or list of floats
        Violation and confidence levels per stage, in (0, 1).

    variance_box : Box (optional)
        Support of the uniform distribution of the basis variances. Defaults
        to :func:`default_variance_box`.

    seed : int
        Master seed. Stage ``k`` draws its basis and its scenarios from
        generators derived from ``(seed, k)``.

    sample_rule : string
        ``"exact"`` (minimal binomial bound) or ``"linear"``
        (``ceil(2 (M - 1)/eps)``), see :mod:`reachadp.scenario`.

    num_samples : int or list of int (optional)
        Scenario counts per stage overriding ``sample_rule``; the violation
        level then follows from the count (see
        :func:`reachadp.scenario.implied_epsilon`).
    """

    def __init__(
        self,
        horizon,
        num_basis,
        epsilon,
        beta,
        variance_box=None,
        seed=0,
        sample_rule="exact",
        num_samples=None,
    ):
        self.horizon = int(horizon)
        if self.horizon < 1:
            raise ValidationError(f"Horizon must be positive, got {horizon}")
        self.num_basis = _per_stage(num_basis, self.horizon, "num_basis", int)
        self.epsilon = _per_stage(epsilon, self.horizon, "epsilon", float)
        self.beta = _per_stage(beta, self.horizon, "beta", float)
        if any(m < 1 for m in self.num_basis):
            raise ValidationError("Every stage needs at least one basis element")
        for k in range(self.horizon):
            # validates the ranges of epsilon and beta
            ScenarioParams(self.epsilon[k], self.beta[k], self.num_basis[k])
        if variance_box is not None and np.any(variance_box.lo <= 0.0):
            raise ValidationError("The variance box must contain positive variances only")
        self.variance_box = variance_box
        if int(seed) < 0:
            raise ValidationError(f"Seed must be non-negative, got {seed}")
        self.seed = int(seed)
        if sample_rule not in SAMPLE_RULES:
            raise ValidationError(f'sample rule "{sample_rule}" not recognized')
        self.sample_rule = sample_rule
        self.num_samples = None
        if num_samples is not None:
            self.num_samples = _per_stage(num_samples, self.horizon, "num_samples", int)
            if any(n < 1 for n in self.num_samples):
                raise ValidationError("Every stage needs at least one scenario")

    def scenario_params(self, k):
        return ScenarioParams(self.epsilon[k], self.beta[k], self.num_basis[k])

    def to_dict(self):
        return {
            "horizon": self.horizon,
            "num_basis": self.num_basis,
            "epsilon": self.epsilon,
            "beta": self.beta,
            "variance_box": None if self.variance_box is None else self.variance_box.to_dict(),
            "seed": self.seed,
            "sample_rule": self.sample_rule,
            "num_samples": self.num_samples,
        }


class ValueStack:
    """
    Approximate value functions of all stages.

    Parameters
    ----------
    problem : ReachAvoidProblem

    stages : dict
        ``k -> GrbfStage`` with weights, for ``k = 0 ... T-1``.

    metadata : dict (optional)
        ``k -> dict`` of synthesis records (sample counts, LP status, seeds).
    """

    def __init__(self, problem, stages, metadata=None):
        if sorted(stages) != list(range(problem.horizon)):
            raise ValidationError(
                f"A value stack needs stages 0 ... {problem.horizon - 1}, got {sorted(stages)}"
            )
        self.problem = problem
        self.stages = dict(stages)
        self.metadata = {k: dict(v) for k, v in (metadata or {}).items()}

    @property
    def horizon(self):
        return self.problem.horizon

    def value_function(self, k):
        """Value function of stage ``k``; ``k = T`` is the indicator of ``K``."""
        if not 0 <= k <= self.horizon:
            raise ValidationError(f"Stage index {k} outside 0 ... {self.horizon}")
        if k == self.horizon:
            return ValueFunction.terminal(self.problem)
        return ValueFunction.from_stage(self.problem, self.stages[k])

    def evaluate(self, k, x):
        return evaluate_value(self, k, x)

    def summary(self):
        """One record per stage, ``k = T-1`` first, as stored in the metadata."""
        rows = []
        for k in range(self.horizon - 1, -1, -1):
            row = {"k": k, "M": self.stages[k].size}
            row.update(self.metadata.get(k, {}))
            rows.append(row)
        return rows


def objective_coefficients(stage, xbar):
    """
    LP objective ``c_i = int_{K' \\ K} phi_i(x) dx``.

    The state-relevance measure is the Lebesgue measure on ``K' \\ K``,
    left unnormalized.
    """
    return stage.box_integrals(xbar)


def sample_basis(problem, n_basis, variance_box, rng, k):
    """Centers uniform on ``K' \\ K``, variances uniform on ``variance_box``."""
    centers = sample_uniform(problem.xbar, rng, size=n_basis)
    variances = variance_box.lo + variance_box.widths * rng.random((n_basis, problem.state_dim))
    return GrbfStage.from_arrays(centers, variances, k)


def synthesize(
    problem, params, rng=None, basis_factory=None, sampler=None, workers=1
):
    """
    Approximate the reach-avoid value functions, stage by stage from ``T-1`` to 0.

    Each stage samples a basis, draws its scenarios, assembles the LP
    against the next stage's value function (the indicator of ``K`` after
    the last stage) and stores the LP weights.

    Parameters
    ----------
    problem : ReachAvoidProblem

    params : SynthesisParams

    rng : numpy.random.Generator (optional)
        When given, the master seed is drawn from it instead of taken from
        ``params.seed``.

    basis_factory : callable (optional)
        ``basis_factory(k, rng) -> list of Grbf`` replacing the random basis.

    sampler : callable (optional)
        Custom scenario sampler, see :func:`reachadp.scenario.draw_scenarios`.

    workers : int (optional)
        Threads used to assemble each LP.

    Returns
    -------
    stack : ValueStack

    Raises
    ------
    LpUnboundedError
        When a stage LP is unbounded (too few scenarios for its basis).
    """
    if params.horizon != problem.horizon:
        raise ValidationError(
            f"Synthesis horizon {params.horizon} does not match problem horizon {problem.horizon}"
        )
    master = params.seed if rng is None else int(rng.integers(2**62))
    variance_box = params.variance_box
    if variance_box is None:
        variance_box = default_variance_box(problem)
    if variance_box.dim != problem.state_dim:
        raise ValidationError("The variance box must have the state dimension")

    stages = {}
    metadata = {}
    prev = ValueFunction.terminal(problem)
    for k in range(problem.horizon - 1, -1, -1):
        t0 = time.perf_counter()
        basis_rng = seeding.derive_rng(master, seeding.BASIS, k)
        if basis_factory is None:
            stage = sample_basis(problem, params.num_basis[k], variance_box, basis_rng, k)
        else:
            elements = list(basis_factory(k, basis_rng))
            if any(not isinstance(g, Grbf) for g in elements):
                raise ValidationError("basis_factory must return Grbf elements")
            stage = GrbfStage(elements, k)
        n_basis = stage.size
        obj = objective_coefficients(stage, problem.xbar)

        if params.num_samples is None:
            epsilon = params.epsilon[k]
            n_samples = required_samples(
                ScenarioParams(epsilon, params.beta[k], n_basis), params.sample_rule
            )
        else:
            n_samples = params.num_samples[k]
            epsilon = implied_epsilon(n_samples, params.beta[k], n_basis)
        scenarios = draw_scenarios(
            problem,
            n_samples,
            seeding.derive_rng(master, seeding.SCENARIOS, k),
            sampler=sampler,
            seed=master,
        )
        lp = assemble(stage, scenarios, prev, problem.kernel, obj, workers=workers)
        t1 = time.perf_counter()
        solution = solve(lp)
        t2 = time.perf_counter()

        if solution.status == UNBOUNDED:
            raise LpUnboundedError(
                f"The LP of stage {k} is unbounded with N={n_samples} scenarios "
                f"for M={n_basis} basis elements; increase N (smaller epsilon) "
                f"or reduce M",
                ray=solution.ray,
                stage=k,
            )
        if solution.status == INFEASIBLE:
            raise NumericalError(f"The LP of stage {k} was reported infeasible")
        stage.set_weights(solution.w)

        stages[k] = stage
        metadata[k] = {
            "N": n_samples,
            "epsilon": epsilon,
            "beta": params.beta[k],
            "status": solution.status,
            "iterations": solution.iterations,
            "objective": solution.objective,
            "seed": master,
            "construction_time": t1 - t0,
            "lp_time": t2 - t1,
            "lp_bytes": int(lp.phi.nbytes + lp.b.nbytes + lp.c.nbytes),
        }
        logger.info(
            "Stage %d: M=%d N=%d status=%s iterations=%d objective=%.6g "
            "(construction %.2fs, LP %.2fs)",
            k,
            n_basis,
            n_samples,
            solution.status,
            solution.iterations,
            solution.objective,
            t1 - t0,
            t2 - t1,
        )
        prev = ValueFunction.from_stage(problem, stage)

    return ValueStack(problem, stages, metadata)


def evaluate_value(stack, k, x):
    """
    Approximate value of stage ``k`` at ``x``: 1 on ``K``, 0 outside ``K'``
    and the weighted basis sum in between. ``k = T`` gives the indicator of ``K``.
    """
    return stack.value_function(k).evaluate(x)


def empirical_violation(stack, k, n_samples, rng):
    """
    Fraction of fresh uniform pairs ``(x, u)`` on ``(K' \\ K) x U`` where
    ``V_k(x) < T_u[V_{k+1}](x)``.

    Parameters
    ----------
    stack : ValueStack

    k : int
        Stage in ``0 ... T-1``.

    n_samples : int

    rng : numpy.random.Generator

    Returns
    -------
    fraction : float
    """
    if not 0 <= k < stack.horizon:
        raise ValidationError(f"Stage index {k} outside 0 ... {stack.horizon - 1}")
    problem = stack.problem
    x = sample_uniform(problem.xbar, rng, size=n_samples)
    u = sample_uniform(problem.control_box, rng, size=n_samples)
    lhs = stack.value_function(k).evaluate(x)
    rhs = apply(stack.value_function(k + 1), problem.kernel, x, u)
    return float(np.mean(lhs < rhs - FEASIBILITY_TOL))
