"""
Dual revised simplex for the stage LPs.

The stage LP ``min c^T w  s.t.  Phi w >= b`` has few free variables and many
rows. Its dual

.. math::

    \\max_{\\lambda \\geq 0} b^T \\lambda \\quad \\text{s.t.} \\quad \\Phi^T \\lambda = c

has only ``M`` equality constraints, so the simplex works with an ``M x M``
basis whatever the number of scenarios. The primal weights are read off the
simplex multipliers of the dual.
"""

import logging

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from reachadp.exceptions import NumericalError
from reachadp.lp.instance import (
    DEGENERATE,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LpSolution,
)

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-8
GAP_TOL = 1e-6
PIVOT_TOL = 1e-10
# Reduced costs of the dual are the primal slacks
OPTIMALITY_TOL = 1e-9
REFACTOR_EVERY = 100
DRIFT_TOL = 1e-7
MAX_REFACTOR_ATTEMPTS = 3


class _Basis:
    """
    LU factorization of a basis plus a product-form file of eta updates.

    Parameters
    ----------
    columns : callable
        ``columns(idx) -> ndarray (M, len(idx))``, the constraint columns.

    idx : ndarray of ints
        Indices of the basic variables, one per row.
    """

    def __init__(self, columns, idx):
        self.columns = columns
        self.idx = np.array(idx)
        self.etas = []
        self.lu = None

    def factorize(self):
        lu, piv = lu_factor(self.columns(self.idx), check_finite=False)
        diag = np.abs(np.diag(lu))
        if diag.min() <= 1e-14 * max(diag.max(), 1.0):
            raise NumericalError("Singular simplex basis")
        self.lu = (lu, piv)
        self.etas = []

    def ftran(self, a):
        """Solve ``B z = a``."""
        z = lu_solve(self.lu, a, check_finite=False)
        for r, alpha in self.etas:
            zr = z[r] / alpha[r]
            z -= alpha * zr
            z[r] = zr
        return z

    def btran(self, v):
        """Solve ``B^T y = v``."""
        v = np.array(v, dtype="float64")
        for r, alpha in reversed(self.etas):
            v[r] = (v[r] - (alpha @ v - alpha[r] * v[r])) / alpha[r]
        return lu_solve(self.lu, v, trans=1, check_finite=False)

    def replace(self, r, q, alpha):
        assert abs(alpha[r]) > PIVOT_TOL
        self.etas.append((r, alpha.copy()))
        self.idx[r] = q


class _DualSimplex:
    """
    Two-phase primal simplex on the dual LP, in the form
    ``min -b^T lambda  s.t.  S Phi^T lambda = |c|, lambda >= 0`` where the
    diagonal sign matrix ``S`` makes the right-hand side nonnegative.
    Phase I starts from ``M`` artificial columns ``e_i``.
    """

    def __init__(self, lp, max_iter=None):
        self.phi = lp.phi
        self.b = lp.b
        self.c = lp.c
        self.n, self.m = lp.phi.shape
        self.sign = np.where(lp.c >= 0.0, 1.0, -1.0)
        self.rhs = np.abs(lp.c)
        self.scale = float(self.rhs.max()) if self.rhs.max() > 0.0 else 1.0
        self.x_tol = FEASIBILITY_TOL * self.scale
        self.iterations = 0
        self.bland_after = 5 * (self.n + self.m)
        self.max_iter = 50 * (self.n + self.m) if max_iter is None else int(max_iter)
        self.failed_refactors = 0

        self.basis = _Basis(self._columns, np.arange(self.n, self.n + self.m))
        self.basis.factorize()
        self.x = self.basis.ftran(self.rhs)

    def _columns(self, idx):
        """Constraint columns of the variables ``idx`` (structural then artificial)."""
        idx = np.asarray(idx)
        cols = np.zeros((self.m, idx.size))
        structural = idx < self.n
        cols[:, structural] = self.sign[:, np.newaxis] * self.phi[idx[structural]].T
        art = np.flatnonzero(~structural)
        cols[idx[art] - self.n, art] = 1.0
        return cols

    def _price(self, y):
        """``A^T y`` for all variables."""
        return np.concatenate([self.phi @ (self.sign * y), y])

    def refactorize(self):
        self.basis.factorize()
        self.x = self.basis.ftran(self.rhs)
        residual = np.max(np.abs(self._columns(self.basis.idx) @ self.x - self.rhs))
        if residual > DRIFT_TOL * self.scale:
            self.failed_refactors += 1
            logger.debug("Residual %.3e after refactorization", residual)
            if self.failed_refactors > MAX_REFACTOR_ATTEMPTS:
                raise NumericalError(
                    f"Basis residual {residual:.3e} persists after "
                    f"{MAX_REFACTOR_ATTEMPTS} refactorizations"
                )
        else:
            self.failed_refactors = 0

    def pivot(self, r, q, alpha, theta):
        self.x -= theta * alpha
        self.x[r] = theta
        self.basis.replace(r, q, alpha)
        self.iterations += 1
        if len(self.basis.etas) >= REFACTOR_EVERY:
            self.refactorize()
            return
        residual = np.max(np.abs(self._columns(self.basis.idx) @ self.x - self.rhs))
        if residual > DRIFT_TOL * self.scale:
            logger.debug("Drift %.3e at iteration %d, refactorizing", residual, self.iterations)
            self.refactorize()

    def run_phase(self, cost, priced):
        """
        Iterate until no priced column has a negative reduced cost.

        Returns
        -------
        y : ndarray of floats
            Simplex multipliers at the last basis.

        ray : tuple or None
            ``(q, alpha)`` when column ``q`` proves the phase unbounded.
        """
        refreshed = False
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalError(f"No convergence after {self.iterations} simplex iterations")
            y = self.basis.btran(cost[self.basis.idx])
            d = cost - self._price(y)
            allowed = priced.copy()
            allowed[self.basis.idx] = False
            candidates = np.flatnonzero(allowed & (d < -OPTIMALITY_TOL))
            if candidates.size == 0:
                if self.basis.etas and not refreshed:
                    # confirm optimality on a fresh factorization
                    self.refactorize()
                    refreshed = True
                    continue
                return y, None
            refreshed = False
            if self.iterations < self.bland_after:
                q = candidates[np.argmin(d[candidates])]
            else:
                q = candidates[0]
            alpha = self.basis.ftran(self._columns([q])[:, 0])
            rows = np.flatnonzero(alpha > PIVOT_TOL)
            if rows.size == 0:
                return y, (q, alpha)
            ratios = np.maximum(self.x[rows], 0.0) / alpha[rows]
            theta = ratios.min()
            ties = rows[ratios == theta]
            r = ties[np.argmin(self.basis.idx[ties])]
            self.pivot(r, q, alpha, theta)

    def drive_out_artificials(self):
        """
        Pivot zero-level artificials out of the basis after phase I.

        An artificial whose basis row vanishes on every structural column
        marks a redundant equality; it stays basic at zero.
        """
        for r in range(self.m):
            if self.basis.idx[r] < self.n:
                continue
            e = np.zeros(self.m)
            e[r] = 1.0
            rho = self.basis.btran(e)
            row = np.abs(self.phi @ (self.sign * rho))
            row[self.basis.idx[self.basis.idx < self.n]] = 0.0
            q = int(np.argmax(row))
            if row[q] <= PIVOT_TOL:
                logger.debug("Row %d of the dual is redundant", r)
                continue
            alpha = self.basis.ftran(self._columns([q])[:, 0])
            self.x[r] = 0.0
            self.pivot(r, q, alpha, 0.0)

    def solve(self):
        n, m = self.n, self.m
        phase1_cost = np.concatenate([np.zeros(n), np.ones(m)])
        y, _ = self.run_phase(phase1_cost, np.ones(n + m, dtype=bool))
        infeasibility = float(phase1_cost[self.basis.idx] @ self.x)
        logger.debug(
            "Phase I done after %d iterations, infeasibility %.3e",
            self.iterations,
            infeasibility,
        )
        if infeasibility > self.x_tol:
            # The phase I multipliers separate c from the cone of the rows
            ray = -(self.sign * y)
            ray /= np.max(np.abs(ray))
            logger.warning(
                "Stage LP is unbounded: the rows of Phi do not cover c; increase the number of scenarios N"
            )
            return LpSolution(
                np.full(m, np.nan),
                -np.inf,
                np.zeros(n),
                UNBOUNDED,
                self.iterations,
                ray,
            )

        self.drive_out_artificials()
        phase2_cost = np.concatenate([-self.b, np.zeros(m)])
        priced = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
        y, unbounded = self.run_phase(phase2_cost, priced)
        logger.debug("Phase II done after %d iterations", self.iterations)
        if unbounded is not None:
            logger.warning("Stage LP is infeasible: its dual is unbounded")
            return LpSolution(
                np.full(m, np.nan), np.inf, np.zeros(n), INFEASIBLE, self.iterations
            )

        w = -(self.sign * y)
        duals = np.zeros(n)
        structural = self.basis.idx < n
        duals[self.basis.idx[structural]] = np.maximum(self.x[structural], 0.0)
        objective = float(self.c @ w)
        gap = abs(objective - float(self.b @ duals))
        if gap > GAP_TOL * (1.0 + abs(objective)):
            logger.warning("Duality gap %.3e exceeds tolerance", gap)
        status = DEGENERATE if np.any(self.x <= self.x_tol) else OPTIMAL
        return LpSolution(w, objective, duals, status, self.iterations)


def solve(lp, max_iter=None):
    """
    Solve a stage LP to optimality.

    Entering columns follow Dantzig's rule (most negative reduced cost)
    and switch to Bland's rule after ``5 (N + M)`` iterations; every tie is
    broken toward the lowest index. The basis is refactorized every 100
    pivots or whenever the basic solution drifts by more than ``1e-7``
    relative to ``|c|``.

    Parameters
    ----------
    lp : LpInstance

    max_iter : int (optional)
        Hard iteration cap, ``50 (N + M)`` by default.

    Returns
    -------
    solution : LpSolution
        ``status`` is ``"optimal"``, or ``"degenerate-tie-broken"`` when a
        basic multiplier is zero (the reported optimizer is then the one
        selected by the tie-breaking rules), ``"unbounded"`` with a ray
        ``d`` (``Phi d >= 0``, ``c^T d < 0``), or ``"infeasible"``.

    Raises
    ------
    NumericalError
        When the basis stays inaccurate after repeated refactorizations or
        the iteration cap is reached.
    """
    return _DualSimplex(lp, max_iter).solve()
