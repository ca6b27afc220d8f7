import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from reachadp.bellman import apply
from reachadp.exceptions import StageStateError, ValidationError

logger = logging.getLogger(__name__)

# Status values of LpSolution
OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"
DEGENERATE = "degenerate-tie-broken"
SOLVED = (OPTIMAL, DEGENERATE)


class LpInstance:
    """
    Stage LP ``min c^T w  s.t.  Phi w >= b``, with ``w`` free.

    Parameters
    ----------
    c : ndarray of floats, shape ``(M,)``
        Objective coefficients.

    phi : ndarray of floats, shape ``(N, M)``
        One constraint row per scenario.

    b : ndarray of floats, shape ``(N,)``
        Right-hand side.
    """

    def __init__(self, c, phi, b):
        c = np.array(c, dtype="float64").reshape(-1)
        phi = np.array(phi, dtype="float64")
        b = np.array(b, dtype="float64").reshape(-1)
        if phi.ndim != 2:
            raise ValidationError(f"The constraint matrix must be 2D, got shape {phi.shape}")
        n_rows, n_cols = phi.shape
        if n_rows == 0:
            raise ValidationError("The LP has no constraints (N = 0)")
        if c.size != n_cols or b.size != n_rows:
            raise ValidationError(
                f"Inconsistent LP shapes: c {c.shape}, Phi {phi.shape}, b {b.shape}"
            )
        for name, arr in (("c", c), ("Phi", phi), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"Non-finite entries in {name}")
        if n_rows < n_cols:
            logger.warning(
                "LP has fewer constraints (%d) than variables (%d); it is likely unbounded",
                n_rows,
                n_cols,
            )
        self.c = c
        self.phi = phi
        self.b = b

    @property
    def n_rows(self):
        return self.phi.shape[0]

    @property
    def n_vars(self):
        return self.phi.shape[1]

    def scaled(self, factor):
        """Copy of the instance with the objective multiplied by ``factor > 0``."""
        if factor <= 0.0:
            raise ValidationError("The objective scale must be positive")
        return LpInstance(self.c * factor, self.phi, self.b)

    def __eq__(self, other):
        if not isinstance(other, LpInstance):
            return NotImplemented
        return (
            np.array_equal(self.c, other.c)
            and np.array_equal(self.phi, other.phi)
            and np.array_equal(self.b, other.b)
        )


class LpSolution:
    """
    Result of :func:`reachadp.lp.simplex.solve`.

    Parameters
    ----------
    w : ndarray of floats, shape ``(M,)``
        Primal weights (``NaN`` unless solved).

    objective : float
        ``c^T w``.

    duals : ndarray of floats, shape ``(N,)``
        Nonnegative multipliers ``lambda`` of the constraint rows.

    status : string
        One of ``"optimal"``, ``"degenerate-tie-broken"``, ``"unbounded"``,
        ``"infeasible"``.

    iterations : int
        Simplex pivots over both phases.

    ray : ndarray of floats (optional)
        For unbounded LPs, a direction ``d`` with ``Phi d >= 0`` and
        ``c^T d < 0``.
    """

    def __init__(self, w, objective, duals, status, iterations=0, ray=None):
        self.w = w
        self.objective = objective
        self.duals = duals
        self.status = status
        self.iterations = iterations
        self.ray = ray

    @property
    def solved(self):
        return self.status in SOLVED

    def certificates(self, lp):
        """
        Feasibility residual, complementary slackness and duality gap.

        Returns
        -------
        report : dict
            ``min_slack`` is ``min(Phi w - b)``; ``complementarity`` is
            ``lambda^T (Phi w - b)``; ``gap`` is ``|c^T w - b^T lambda|``.
        """
        slack = lp.phi @ self.w - lp.b
        return {
            "min_slack": float(slack.min()),
            "complementarity": float(self.duals @ slack),
            "gap": float(abs(lp.c @ self.w - lp.b @ self.duals)),
        }

    def __repr__(self):
        return (
            f"LpSolution(status={self.status!r}, objective={self.objective!r}, "
            f"iterations={self.iterations})"
        )


def assemble(stage, scenarios, prev, q, obj, workers=1):
    """
    Build the LP of one stage from its scenarios.

    Row ``s`` reads ``sum_i w_i phi_i(x^s) >= T_{u^s}[prev](x^s)``.

    Parameters
    ----------
    stage : GrbfStage
        Basis of the stage, without weights.

    scenarios : ScenarioSet

    prev : ValueFunction
        Value function of the following stage.

    q : GaussianMixtureKernel

    obj : ndarray of floats, shape ``(M,)``
        Objective coefficients, see :func:`reachadp.adp.objective_coefficients`.

    workers : int (optional)
        Number of threads evaluating the right-hand side. Rows are split in
        contiguous blocks, so the result does not depend on ``workers``.

    Returns
    -------
    lp : LpInstance
    """
    if stage.has_weights():
        raise StageStateError(f"Stage {stage.k} already has weights")
    if len(scenarios) == 0:
        raise ValidationError("The LP has no constraints (N = 0)")
    phi = stage.design_matrix(scenarios.states)
    if workers <= 1:
        b = apply(prev, q, scenarios.states, scenarios.controls)
    else:
        blocks = np.array_split(np.arange(len(scenarios)), workers)
        blocks = [blk for blk in blocks if blk.size]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    apply, prev, q, scenarios.states[blk], scenarios.controls[blk]
                )
                for blk in blocks
            ]
            b = np.concatenate([f.result() for f in futures])
    return LpInstance(obj, phi, b)
