"""
Regulation benchmarks: reach a box around the origin under ``x+ = x + u + w``,
without (``example1``) and with (``example2``) random box obstacles.

Each suite writes a set of CSV files and a ``manifest.json`` with the
settings, seeds and timings of the run.
"""

import json
import logging
import os
import time

import numpy as np

from reachadp.adp import SynthesisParams, empirical_violation, synthesize
from reachadp.evaluation import evaluate_stack, initial_conditions
from reachadp.exceptions import LpUnboundedError, ValidationError
from reachadp.kernels import GaussianMixtureKernel
from reachadp.problem import ReachAvoidProblem, random_obstacles
from reachadp.utils import seeding
from reachadp.utils.box import Box, subtract
from reachadp.utils.csv_output import write_csv

logger = logging.getLogger(__name__)

SUITES = ("example1", "example2")

# Settings per scale. ``dims`` are state dimensions; dim(X x U) is twice that.
SCALES = {
    "smoke": {
        "dims": [2],
        "num_basis": 20,
        "basis_sweep": [10, 20],
        "sample_sweep": [200, 800],
        "initial_conditions": 5,
        "rollouts": 20,
        "violation_samples": 1000,
        "n_starts": 3,
    },
    "desk": {
        "dims": [2],
        "num_basis": 100,
        "basis_sweep": [50, 100, 200],
        "sample_sweep": [400, 4000, 40000],
        "initial_conditions": 100,
        "rollouts": 100,
        "violation_samples": 10000,
        "n_starts": 10,
    },
    "full": {
        "dims": [2, 3, 4],
        "num_basis": [100, 500, 1000],
        "basis_sweep": [50, 100, 200, 500, 1000],
        "sample_sweep": [400, 4000, 40000],
        "initial_conditions": 100,
        "rollouts": 100,
        "violation_samples": 10000,
        "n_starts": 10,
    },
}

EPSILON = 0.05
BETA = 0.01
NOISE_VARIANCE = 0.01
EXAMPLE1_HORIZON = 5
EXAMPLE2_HORIZON = 7
OBSTACLES = {"count": 3, "half_width": 0.15, "margin": 0.05}

SUMMARY_HEADER = [
    "dim(X x U)",
    "M",
    "N",
    "epsilon",
    "beta",
    "construction time [s]",
    "LP time [s]",
    "LP memory [bytes]",
    "mean |V0~-V_ADP|",
    "mean |V_ADP-V_LQG|",
]
BASIS_SWEEP_HEADER = [
    "dim(X x U)",
    "M",
    "N",
    "construction time [s]",
    "LP time [s]",
    "mean |V0~-V_ADP|",
    "mean |V_ADP-V_LQG|",
]
SAMPLE_SWEEP_HEADER = [
    "dim(X x U)",
    "M",
    "N",
    "epsilon",
    "status",
    "mean |V0~-V_ADP|",
    "empirical violation",
]


def example1_problem(n, variance=NOISE_VARIANCE, horizon=EXAMPLE1_HORIZON):
    """
    Origin regulation in ``n`` dimensions: ``X = K' = [-1, 1]^n``,
    ``U = [-0.1, 0.1]^n``, ``K = [-0.1, 0.1]^n`` and ``w ~ N(0, variance I)``.
    """
    return ReachAvoidProblem(
        state_box=Box(-np.ones(n), np.ones(n)),
        control_box=Box(-0.1 * np.ones(n), 0.1 * np.ones(n)),
        target=Box(-0.1 * np.ones(n), 0.1 * np.ones(n)),
        safe=Box(-np.ones(n), np.ones(n)),
        horizon=horizon,
        kernel=GaussianMixtureKernel.integrator(n, variance),
    )


def example2_problem(
    n,
    seed=0,
    count=OBSTACLES["count"],
    half_width=OBSTACLES["half_width"],
    margin=OBSTACLES["margin"],
    variance=NOISE_VARIANCE,
    horizon=EXAMPLE2_HORIZON,
):
    """
    Origin regulation with ``count`` random cubic obstacles removed from the
    safe set. The obstacles are placed from ``seed``.
    """
    base = example1_problem(n, variance, horizon)
    rng = seeding.derive_rng(seed, seeding.OBSTACLES)
    obstacles = random_obstacles(base.state_box, base.target, count, half_width, rng, margin)
    return ReachAvoidProblem(
        state_box=base.state_box,
        control_box=base.control_box,
        target=base.target,
        safe=subtract(base.safe, obstacles),
        horizon=horizon,
        kernel=base.kernel,
        obstacles=obstacles,
    )


def basis_variance_box(n):
    """Support ``[0.02, 0.095]^n`` of the basis variances."""
    return Box(0.02 * np.ones(n), 0.095 * np.ones(n))


def load_scale(scale):
    """
    Settings of a named scale (``"smoke"``, ``"desk"``, ``"full"``) or of a
    JSON file overriding the ``"desk"`` settings.
    """
    if scale in SCALES:
        settings = dict(SCALES[scale])
    else:
        try:
            with open(scale) as f:
                overrides = json.load(f)
        except (OSError, json.JSONDecodeError) as err:
            raise ValidationError(f'Scale "{scale}" is neither a known scale nor a readable JSON file: {err}') from err
        unknown = set(overrides) - set(SCALES["desk"])
        if unknown:
            raise ValidationError(f"Unknown scale settings {sorted(unknown)}")
        settings = dict(SCALES["desk"], **overrides)
    for key in ("dims", "basis_sweep", "sample_sweep"):
        if not settings[key]:
            raise ValidationError(f'The "{key}" list of the scale is empty')
    if any(int(d) < 1 for d in settings["dims"]):
        raise ValidationError("State dimensions must be positive")
    num_basis = settings["num_basis"]
    if np.ndim(num_basis) == 0:
        settings["num_basis"] = [int(num_basis)] * len(settings["dims"])
    elif len(num_basis) != len(settings["dims"]):
        raise ValidationError("num_basis needs one entry per dimension")
    return settings


def _synthesis_params(problem, num_basis, seed, num_samples=None):
    return SynthesisParams(
        horizon=problem.horizon,
        num_basis=num_basis,
        epsilon=EPSILON,
        beta=BETA,
        variance_box=basis_variance_box(problem.state_dim),
        seed=seed,
        sample_rule="linear",
        num_samples=num_samples,
    )


def _stage_means(stack, key):
    return float(np.mean([stack.metadata[k][key] for k in range(stack.horizon)]))


def _evaluate(stack, settings, seed, workers, blocked):
    rng = seeding.derive_rng(seed, seeding.INITIAL_CONDITIONS)
    x0s = initial_conditions(stack.problem, settings["initial_conditions"], rng, blocked=blocked)
    return evaluate_stack(
        stack,
        x0s,
        settings["rollouts"],
        seed=seed,
        baseline="lqg",
        n_starts=settings["n_starts"],
        workers=workers,
    )


def _run_one(problem, num_basis, settings, seed, workers, blocked, runs):
    t0 = time.perf_counter()
    stack = synthesize(problem, _synthesis_params(problem, num_basis, seed), workers=workers)
    result = _evaluate(stack, settings, seed, workers, blocked)
    runs.append(
        {
            "dim": problem.state_dim,
            "M": num_basis,
            "seed": seed,
            "wall_time": time.perf_counter() - t0,
        }
    )
    return stack, result


def _problem(suite, n, seed):
    if suite == "example1":
        return example1_problem(n)
    return example2_problem(n, seed=seed)


def run_suite(suite, out_dir, scale="desk", seed=0, workers=1):
    """
    Run a benchmark suite and write its CSV files to ``out_dir``.

    Files (with ``<suite>`` the suite name):

    - ``<suite>_summary.csv``: one row per dimension, see ``SUMMARY_HEADER``.
    - ``<suite>_basis_sweep.csv``: accuracy against the number of basis elements.
    - ``example1_sample_sweep.csv``: accuracy and empirical violation
      against the number of scenarios (``example1`` only).
    - ``manifest.json``

    Parameters
    ----------
    suite : string
        ``"example1"`` or ``"example2"``.

    out_dir : string

    scale : string
        Name of a scale in ``SCALES`` or path of a JSON file.

    seed : int

    workers : int

    Returns
    -------
    manifest : dict
    """
    if suite not in SUITES:
        raise ValidationError(f'Suite "{suite}" not recognized, use one of {SUITES}')
    settings = load_scale(scale)
    os.makedirs(out_dir, exist_ok=True)
    blocked = suite == "example2"
    t_start = time.perf_counter()
    runs = []
    files = []

    summary_rows = []
    for n, num_basis in zip(settings["dims"], settings["num_basis"]):
        problem = _problem(suite, n, seed)
        logger.info("%s: dim(X x U)=%d, M=%d", suite, 2 * n, num_basis)
        stack, result = _run_one(problem, num_basis, settings, seed, workers, blocked, runs)
        summary_rows.append(
            [
                2 * n,
                num_basis,
                int(_stage_means(stack, "N")),
                EPSILON,
                BETA,
                _stage_means(stack, "construction_time"),
                _stage_means(stack, "lp_time"),
                int(max(stack.metadata[k]["lp_bytes"] for k in range(stack.horizon))),
                result.value_gap,
                result.baseline_gap,
            ]
        )
    path = os.path.join(out_dir, f"{suite}_summary.csv")
    write_csv(path, SUMMARY_HEADER, summary_rows)
    files.append(os.path.basename(path))

    n = settings["dims"][0]
    problem = _problem(suite, n, seed)
    sweep_rows = []
    for num_basis in settings["basis_sweep"]:
        logger.info("%s basis sweep: M=%d", suite, num_basis)
        stack, result = _run_one(problem, int(num_basis), settings, seed, workers, blocked, runs)
        sweep_rows.append(
            [
                2 * n,
                int(num_basis),
                int(_stage_means(stack, "N")),
                _stage_means(stack, "construction_time"),
                _stage_means(stack, "lp_time"),
                result.value_gap,
                result.baseline_gap,
            ]
        )
    path = os.path.join(out_dir, f"{suite}_basis_sweep.csv")
    write_csv(path, BASIS_SWEEP_HEADER, sweep_rows)
    files.append(os.path.basename(path))

    if suite == "example1":
        path = os.path.join(out_dir, "example1_sample_sweep.csv")
        rows = _sample_sweep(problem, settings, seed, workers)
        write_csv(path, SAMPLE_SWEEP_HEADER, rows)
        files.append(os.path.basename(path))

    manifest = {
        "suite": suite,
        "scale": scale,
        "settings": settings,
        "seed": seed,
        "epsilon": EPSILON,
        "beta": BETA,
        "noise_variance": NOISE_VARIANCE,
        "horizon": problem.horizon,
        "problem_hash": problem.hash(),
        "runs": runs,
        "files": files,
        "wall_time": time.perf_counter() - t_start,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    logger.info("%s finished in %.1fs, output in %s", suite, manifest["wall_time"], out_dir)
    return manifest


def _sample_sweep(problem, settings, seed, workers):
    num_basis = settings["num_basis"][0]
    n = problem.state_dim
    rows = []
    for n_samples in settings["sample_sweep"]:
        logger.info("example1 sample sweep: N=%d", n_samples)
        params = _synthesis_params(problem, num_basis, seed, num_samples=int(n_samples))
        try:
            stack = synthesize(problem, params, workers=workers)
        except LpUnboundedError as err:
            logger.warning("N=%d: %s", n_samples, err)
            rows.append([2 * n, num_basis, int(n_samples), 1.0, "unbounded", np.nan, np.nan])
            continue
        result = _evaluate(stack, settings, seed, workers, blocked=False)
        violations = [
            empirical_violation(
                stack, k, settings["violation_samples"], seeding.derive_rng(seed, seeding.VIOLATION, k)
            )
            for k in range(stack.horizon)
        ]
        rows.append(
            [
                2 * n,
                num_basis,
                int(n_samples),
                stack.metadata[0]["epsilon"],
                stack.metadata[0]["status"],
                result.value_gap,
                float(np.max(violations)),
            ]
        )
    return rows
