import hashlib
import json

import numpy as np

from reachadp.exceptions import ValidationError
from reachadp.utils.box import Box, BoxUnion, subtract

# Region codes returned by ReachAvoidProblem.classify
IN_TARGET = 0
IN_XBAR = 1
OUTSIDE_SAFE = 2


class ReachAvoidProblem:
    """
    Finite-horizon stochastic reach-avoid problem.

    The goal is to maximize the probability that the controlled state
    enters the target set ``K`` within ``horizon`` steps while staying in
    the safe set ``K'`` until then.

    Parameters
    ----------
    state_box : Box
        Bounded state space ``X`` (used for gridding and bounding boxes).

    control_box : Box
        Control space ``U``.

    target : BoxUnion
        Target set ``K``, a subset of ``safe``.

    safe : BoxUnion
        Safe set ``K'``, a subset of ``state_box``.

    horizon : int
        Number of steps ``T``.

    kernel : GaussianMixtureKernel
        Transition kernel ``Q(dy | x, u)``.

    obstacles : BoxUnion (optional)
        Obstacle boxes, already removed from ``safe``. Only kept as a record,
        e.g. to pick initial conditions behind an obstacle.

    Examples
    --------

    >>> from reachadp.kernels import GaussianMixtureKernel
    >>> from reachadp.problem import ReachAvoidProblem
    >>> from reachadp.utils.box import Box, BoxUnion
    >>> problem = ReachAvoidProblem(
    ...     state_box=Box([-1, -1], [1, 1]),
    ...     control_box=Box([-0.1, -0.1], [0.1, 0.1]),
    ...     target=BoxUnion([Box([-0.1, -0.1], [0.1, 0.1])]),
    ...     safe=BoxUnion([Box([-1, -1], [1, 1])]),
    ...     horizon=5,
    ...     kernel=GaussianMixtureKernel.integrator(2, variance=0.01),
    ... )
    >>> round(problem.xbar.volume(), 12)
    3.96
    """

    def __init__(
        self, state_box, control_box, target, safe, horizon, kernel, obstacles=None
    ):
        if isinstance(target, Box):
            target = BoxUnion.from_box(target)
        if isinstance(safe, Box):
            safe = BoxUnion.from_box(safe)
        self.state_box = state_box
        self.control_box = control_box
        self.target = target
        self.safe = safe
        self.horizon = int(horizon)
        self.kernel = kernel
        self.obstacles = obstacles
        self._validate()
        self.xbar = subtract(safe, target)
        if self.xbar.volume() <= 0.0:
            raise ValidationError("The region K' \\ K must have positive volume")

    def _validate(self):
        n = self.state_box.dim
        if self.horizon < 1:
            raise ValidationError(f"Horizon must be a positive integer, got {self.horizon}")
        for name, s in (("target", self.target), ("safe", self.safe)):
            if s.dim != n:
                raise ValidationError(f"The {name} set has dimension {s.dim}, expected {n}")
        if self.kernel.state_dim != n:
            raise ValidationError(
                f"Kernel state dimension {self.kernel.state_dim} does not match {n}"
            )
        if self.kernel.control_dim != self.control_box.dim:
            raise ValidationError(
                f"Kernel control dimension {self.kernel.control_dim} does not match "
                f"{self.control_box.dim}"
            )
        if self.safe.is_empty():
            raise ValidationError("The safe set is empty")
        if not self.target.is_subset_of(self.safe):
            raise ValidationError("The target set must be contained in the safe set")
        if not self.safe.is_subset_of(BoxUnion.from_box(self.state_box)):
            raise ValidationError("The safe set must be contained in the state box")

    @property
    def state_dim(self):
        return self.state_box.dim

    @property
    def control_dim(self):
        return self.control_box.dim

    def classify(self, x):
        """
        Region of each point: ``IN_TARGET``, ``IN_XBAR`` or ``OUTSIDE_SAFE``.

        Points on a face shared by ``K`` and ``K' \\ K`` belong to ``K``.
        """
        in_target = self.target.contains(x)
        in_safe = self.safe.contains(x)
        return np.where(in_target, IN_TARGET, np.where(in_safe, IN_XBAR, OUTSIDE_SAFE))[()]

    def to_dict(self):
        data = {
            "state_box": self.state_box.to_dict(),
            "control_box": self.control_box.to_dict(),
            "target": self.target.to_dict(),
            "safe": self.safe.to_dict(),
            "horizon": self.horizon,
            "kernel": self.kernel.to_dict(),
        }
        if self.obstacles is not None:
            data["obstacles"] = self.obstacles.to_dict()
        return data

    def hash(self):
        """SHA-256 of the canonical JSON description of the problem."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def random_obstacles(state_box, target, count, half_width, rng, margin=0.0, max_attempts=10_000):
    """
    Place ``count`` cubic obstacles uniformly inside ``state_box``.

    Each obstacle has half-width ``half_width`` in every dimension. Obstacles
    grown by ``margin`` must not overlap ``target`` nor each other;
    candidates that do are redrawn.

    Parameters
    ----------
    state_box : Box

    target : BoxUnion or Box

    count : int

    half_width : float

    rng : numpy.random.Generator

    margin : float (optional)

    max_attempts : int (optional)
        Candidates drawn before giving up.

    Returns
    -------
    obstacles : BoxUnion

    Raises
    ------
    ValidationError
        When the obstacles do not fit or cannot be placed.
    """
    if isinstance(target, Box):
        target = BoxUnion.from_box(target)
    n = state_box.dim
    if count < 0 or half_width <= 0.0 or margin < 0.0:
        raise ValidationError("Obstacles need count >= 0, half_width > 0 and margin >= 0")
    if np.any(state_box.widths < 2.0 * half_width):
        raise ValidationError(f"Obstacles of half-width {half_width} do not fit in {state_box}")
    lo = state_box.lo + half_width
    hi = state_box.hi - half_width
    placed = []
    attempts = 0
    while len(placed) < count:
        if attempts >= max_attempts:
            raise ValidationError(
                f"Could only place {len(placed)} of {count} obstacles in {max_attempts} attempts"
            )
        attempts += 1
        center = lo + (hi - lo) * rng.random(n)
        grown = Box(center - half_width - margin, center + half_width + margin)
        if any(grown.overlaps(b) for b in target) or any(grown.overlaps(b) for b in placed):
            continue
        placed.append(Box(center - half_width, center + half_width))
    return BoxUnion(placed, dim=n)
