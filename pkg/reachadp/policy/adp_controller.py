from reachadp.bellman import apply, apply_max
from reachadp.exceptions import ValidationError
from reachadp.problem import IN_XBAR
from reachadp.utils import seeding
from reachadp.utils.optimize import grid_search

from .controller import Controller


def act(stack, k, x, rng, n_starts=10, tol=1e-7, max_iter=200, resolution=None):
    """
    Greedy control with respect to the next stage's approximate value.

    Maximizes ``u -> T_u[V_{k+1}](x)`` over the control box by projected
    gradient ascent from the box center and ``n_starts`` uniform starts.
    In ``K`` or outside ``K'`` the control is irrelevant and the box
    center is returned.

    Parameters
    ----------
    stack : ValueStack

    k : int
        Stage, ``0 <= k < T``.

    x : ndarray of floats, shape ``(n,)``

    rng : numpy.random.Generator
        Source of the random starts.

    n_starts : int
        Number of uniform starts.

    tol, max_iter :
        Stopping rule of the ascent (projected-gradient step norm and
        iteration cap).

    resolution : int (optional)
        When given, replace the ascent by an exhaustive search over a
        regular grid with that many points per control dimension.

    Returns
    -------
    u : ndarray of floats, shape ``(m,)``
    """
    problem = stack.problem
    box = problem.control_box
    if not 0 <= k < stack.horizon:
        raise ValidationError(f"Stage index {k} outside 0 ... {stack.horizon - 1}")
    if problem.classify(x) != IN_XBAR:
        return box.center.copy()
    v = stack.value_function(k + 1)
    if resolution is not None:
        u, _ = grid_search(lambda U: apply(v, problem.kernel, x, U), box, resolution)
        return u
    u, _ = apply_max(
        v, problem.kernel, x, box, rng, n_starts=n_starts, tol=tol, max_iter=max_iter
    )
    return u


class AdpController(Controller):
    """
    Derived class for the controller of a synthesized value stack.

    Each decision uses its own generator, derived from ``seed``, the stage
    and a digest of the state, so a decision does not depend on the
    decisions taken before it.

    Parameters
    ----------
    stack : ValueStack

    seed : int (optional)

    n_starts : int (optional)
        Uniform starts of the ascent.

    resolution : int (optional)
        Use grid search with this resolution instead of the ascent.
    """

    kind = "adp"

    def __init__(self, stack, seed=0, n_starts=10, resolution=None):
        super().__init__(stack.problem.control_box)
        self.stack = stack
        self.seed = int(seed)
        self.n_starts = n_starts
        self.resolution = resolution

    def _act(self, k, x):
        rng = seeding.derive_rng(self.seed, seeding.POLICY, k, seeding.point_key(x))
        return act(
            self.stack, k, x, rng, n_starts=self.n_starts, resolution=self.resolution
        )
