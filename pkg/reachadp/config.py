"""
Experiment configuration.

An experiment is described by a JSON document::

    {
      "format_version": 1,
      "problem": {
        "state_dim": 2, "control_dim": 2,
        "state_box": {"lo": [-1, -1], "hi": [1, 1]},
        "control_box": {"lo": [-0.1, -0.1], "hi": [0.1, 0.1]},
        "target": [{"lo": [-0.1, -0.1], "hi": [0.1, 0.1]}],
        "safe": [{"lo": [-1, -1], "hi": [1, 1]}],
        "obstacles": [...] or {"count": 3, "half_width": 0.15, "seed": 0, "margin": 0.05},
        "horizon": 5,
        "kernel": {"A": [[1, 0], [0, 1]], "B": [[1, 0], [0, 1]], "offset": [0, 0],
                   "components": [{"weight": 1.0, "mean_shift": [0, 0], "variance": [0.01, 0.01]}]}
      },
      "synthesis": {"num_basis": 100, "epsilon": 0.05, "beta": 0.01,
                    "variance_box": {"lo": [...], "hi": [...]}, "seed": 0,
                    "sample_rule": "exact"},
      "evaluation": {"initial_conditions": 100, "rollouts": 100, "baseline": "lqg",
                     "grid_resolution": 100, "control_resolution": 21, "seed": 0}
    }

Obstacles are removed from the safe set when the problem is built.
Everything is validated before any computation starts.
"""

import json

import numpy as np

from reachadp.adp import SynthesisParams
from reachadp.evaluation import BASELINES
from reachadp.exceptions import ReachAdpError, ValidationError
from reachadp.kernels import GaussianMixtureKernel
from reachadp.problem import ReachAvoidProblem, random_obstacles
from reachadp.utils import seeding
from reachadp.utils.box import Box, BoxUnion, subtract

CONFIG_VERSION = 1

_PROBLEM_KEYS = {
    "state_dim",
    "control_dim",
    "state_box",
    "control_box",
    "target",
    "safe",
    "obstacles",
    "horizon",
    "kernel",
}
_SYNTHESIS_KEYS = {
    "num_basis",
    "epsilon",
    "beta",
    "variance_box",
    "seed",
    "sample_rule",
    "num_samples",
}
_EVALUATION_KEYS = {
    "initial_conditions",
    "rollouts",
    "baseline",
    "grid_resolution",
    "control_resolution",
    "seed",
    "n_starts",
    "blocked",
}


class EvaluationParams:
    """
    Closed-loop evaluation settings.

    Parameters
    ----------
    initial_conditions : int
        Number of initial states drawn from ``K' \\ K``.

    rollouts : int
        Trajectories simulated per initial state and controller.

    baseline : string
        ``"lqg"``, ``"grid"`` or ``"none"``.

    grid_resolution, control_resolution : int
        Points per state and control dimension of the grid baseline.

    seed : int
        Seed of the initial states, the rollouts and the policy starts.

    n_starts : int
        Starts of the ADP control optimization.

    blocked : bool
        Draw initial states whose straight path to ``K`` crosses an obstacle.
    """

    def __init__(
        self,
        initial_conditions=100,
        rollouts=100,
        baseline="lqg",
        grid_resolution=100,
        control_resolution=21,
        seed=0,
        n_starts=10,
        blocked=False,
    ):
        self.initial_conditions = int(initial_conditions)
        self.rollouts = int(rollouts)
        if self.initial_conditions < 1 or self.rollouts < 1:
            raise ValidationError("initial_conditions and rollouts must be positive")
        if baseline not in BASELINES:
            raise ValidationError(f'baseline "{baseline}" not recognized, use one of {BASELINES}')
        self.baseline = baseline
        self.grid_resolution = int(grid_resolution)
        self.control_resolution = int(control_resolution)
        if self.grid_resolution < 2 or self.control_resolution < 1:
            raise ValidationError("grid_resolution must be >= 2 and control_resolution >= 1")
        if int(seed) < 0:
            raise ValidationError(f"Seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.n_starts = int(n_starts)
        if self.n_starts < 1:
            raise ValidationError("n_starts must be positive")
        self.blocked = bool(blocked)

    def to_dict(self):
        return {
            "initial_conditions": self.initial_conditions,
            "rollouts": self.rollouts,
            "baseline": self.baseline,
            "grid_resolution": self.grid_resolution,
            "control_resolution": self.control_resolution,
            "seed": self.seed,
            "n_starts": self.n_starts,
            "blocked": self.blocked,
        }


class ExperimentConfig:
    """
    Problem, synthesis and evaluation settings of one experiment.

    Parameters
    ----------
    problem : ReachAvoidProblem

    synthesis : SynthesisParams

    evaluation : EvaluationParams

    source : string (optional)
        Path of the file the configuration was read from.
    """

    def __init__(self, problem, synthesis, evaluation, source=None):
        if synthesis.horizon != problem.horizon:
            raise ValidationError(
                f"Synthesis horizon {synthesis.horizon} does not match problem horizon "
                f"{problem.horizon}"
            )
        self.problem = problem
        self.synthesis = synthesis
        self.evaluation = evaluation
        self.source = source

    def with_seed(self, seed):
        """Copy with ``seed`` as both synthesis and evaluation seed."""
        synthesis = dict(self.synthesis.to_dict(), seed=seed)
        if synthesis["variance_box"] is not None:
            synthesis["variance_box"] = Box.from_dict(synthesis["variance_box"])
        evaluation = dict(self.evaluation.to_dict(), seed=seed)
        return ExperimentConfig(
            self.problem, SynthesisParams(**synthesis), EvaluationParams(**evaluation), self.source
        )

    def to_dict(self):
        return {
            "format_version": CONFIG_VERSION,
            "problem": self.problem.to_dict(),
            "synthesis": self.synthesis.to_dict(),
            "evaluation": self.evaluation.to_dict(),
        }


def _check_keys(section, data, allowed, required=()):
    if not isinstance(data, dict):
        raise ValidationError(f'Section "{section}" must be a JSON object')
    unknown = set(data) - set(allowed)
    if unknown:
        raise ValidationError(f'Unknown keys in "{section}": {sorted(unknown)}')
    missing = [key for key in required if key not in data]
    if missing:
        raise ValidationError(f'Missing keys in "{section}": {missing}')


def _box(data, dim, name):
    if not isinstance(data, dict) or set(data) != {"lo", "hi"}:
        raise ValidationError(f'{name} must be written {{"lo": [...], "hi": [...]}}')
    box = Box(data["lo"], data["hi"])
    if box.dim != dim:
        raise ValidationError(f"{name} has dimension {box.dim}, expected {dim}")
    return box


def _boxes(data, dim, name):
    if not isinstance(data, list):
        raise ValidationError(f"{name} must be a list of boxes")
    return BoxUnion([_box(d, dim, f"{name}[{i}]") for i, d in enumerate(data)], dim=dim)


def _kernel(data, n, m):
    _check_keys("problem.kernel", data, {"A", "B", "offset", "components"}, ("A", "B", "components"))
    A = np.array(data["A"], dtype="float64")
    B = np.array(data["B"], dtype="float64")
    if A.shape != (n, n):
        raise ValidationError(f"Kernel A has shape {A.shape}, expected {(n, n)}")
    if B.shape != (n, m):
        raise ValidationError(f"Kernel B has shape {B.shape}, expected {(n, m)}")
    components = data["components"]
    if not isinstance(components, list) or not components:
        raise ValidationError("The kernel needs at least one mixture component")
    parsed = []
    for i, c in enumerate(components):
        _check_keys(f"problem.kernel.components[{i}]", c, {"weight", "mean_shift", "variance"}, ("variance",))
        parsed.append((float(c.get("weight", 1.0)), c.get("mean_shift"), c["variance"]))
    return GaussianMixtureKernel.affine(A, B, parsed, offset=data.get("offset"))


def _obstacles(data, state_box, target):
    n = state_box.dim
    if isinstance(data, list):
        return _boxes(data, n, "problem.obstacles")
    _check_keys("problem.obstacles", data, {"count", "half_width", "seed", "margin"}, ("count", "half_width"))
    rng = seeding.derive_rng(int(data.get("seed", 0)), seeding.OBSTACLES)
    return random_obstacles(
        state_box,
        target,
        int(data["count"]),
        float(data["half_width"]),
        rng,
        margin=float(data.get("margin", 0.0)),
    )


def problem_from_dict(data):
    """Build a :class:`~reachadp.problem.ReachAvoidProblem` from the ``problem`` section."""
    _check_keys(
        "problem",
        data,
        _PROBLEM_KEYS,
        ("state_dim", "control_dim", "state_box", "control_box", "target", "safe", "horizon", "kernel"),
    )
    n = int(data["state_dim"])
    m = int(data["control_dim"])
    if n < 1 or m < 1:
        raise ValidationError("state_dim and control_dim must be positive")
    state_box = _box(data["state_box"], n, "problem.state_box")
    control_box = _box(data["control_box"], m, "problem.control_box")
    target = _boxes(data["target"], n, "problem.target")
    safe = _boxes(data["safe"], n, "problem.safe")
    obstacles = None
    if data.get("obstacles") is not None:
        obstacles = _obstacles(data["obstacles"], state_box, target)
        safe = subtract(safe, obstacles)
    return ReachAvoidProblem(
        state_box=state_box,
        control_box=control_box,
        target=target,
        safe=safe,
        horizon=data["horizon"],
        kernel=_kernel(data["kernel"], n, m),
        obstacles=obstacles,
    )


def synthesis_from_dict(data, horizon, state_dim):
    _check_keys("synthesis", data, _SYNTHESIS_KEYS, ("num_basis", "epsilon", "beta"))
    variance_box = None
    if data.get("variance_box") is not None:
        variance_box = _box(data["variance_box"], state_dim, "synthesis.variance_box")
    return SynthesisParams(
        horizon=horizon,
        num_basis=data["num_basis"],
        epsilon=data["epsilon"],
        beta=data["beta"],
        variance_box=variance_box,
        seed=data.get("seed", 0),
        sample_rule=data.get("sample_rule", "exact"),
        num_samples=data.get("num_samples"),
    )


def evaluation_from_dict(data):
    _check_keys("evaluation", data, _EVALUATION_KEYS)
    return EvaluationParams(**data)


def config_from_dict(data, source=None):
    """
    Validate a configuration document and build an :class:`ExperimentConfig`.

    Raises
    ------
    ValidationError
        On any schema, range or dimension inconsistency.
    """
    _check_keys("config", data, {"format_version", "problem", "synthesis", "evaluation"}, ("format_version", "problem", "synthesis"))
    if data["format_version"] != CONFIG_VERSION:
        raise ValidationError(
            f"Unsupported config format_version {data['format_version']}, expected {CONFIG_VERSION}"
        )
    try:
        problem = problem_from_dict(data["problem"])
        synthesis = synthesis_from_dict(data["synthesis"], problem.horizon, problem.state_dim)
        evaluation = evaluation_from_dict(data.get("evaluation", {}))
    except ReachAdpError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ValidationError(f"Malformed config: {err}") from err
    return ExperimentConfig(problem, synthesis, evaluation, source)


def load_config(path):
    """Read and validate the JSON configuration at ``path``."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as err:
        raise ValidationError(f"Cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ValidationError(f"Config {path} is not valid JSON: {err}") from err
    return config_from_dict(data, source=str(path))
