import logging

import numpy as np
import scipy.linalg as linalg

from reachadp.exceptions import UnsupportedError, ValidationError
from reachadp.kernels.affine_mean_map import AffineMeanMap
from reachadp.policy.controller import Controller

logger = logging.getLogger(__name__)


def riccati_gains(A, B, Q, R, horizon):
    """
    Finite-horizon Riccati difference recursion from ``P_T = Q``.

    .. math::

        K_k = (R + B^T P_{k+1} B)^{-1} B^T P_{k+1} A, \\quad
        P_k = Q + A^T P_{k+1} A - A^T P_{k+1} B K_k

    Returns
    -------
    gains : list of ndarrays
        ``K_0 ... K_{T-1}``, each of shape ``(m, n)``.

    costs : list of ndarrays
        ``P_0 ... P_T``.
    """
    P = np.array(Q, dtype="float64")
    costs = [P]
    gains = []
    for _ in range(horizon):
        S = R + B.T @ P @ B
        K = linalg.solve(S, B.T @ P @ A, assume_a="sym")
        P = Q + A.T @ P @ A - A.T @ P @ B @ K
        P = 0.5 * (P + P.T)
        gains.append(K)
        costs.append(P)
    gains.reverse()
    costs.reverse()
    return gains, costs


def riccati_residual(A, B, Q, R, P, P_next):
    """Max-norm residual of ``P = Q + A^T P' A - A^T P' B (R + B^T P' B)^{-1} B^T P' A``."""
    S = R + B.T @ P_next @ B
    rhs = Q + A.T @ P_next @ A - A.T @ P_next @ B @ linalg.solve(S, B.T @ P_next @ A)
    return float(np.max(np.abs(P - rhs)))


class LqgController(Controller):
    """
    Derived class for the projected linear-quadratic baseline.

    The input is ``u = clip(-K_k (x - x_ref), U)``.

    Parameters
    ----------
    gains : list of ndarrays
        Feedback gains ``K_0 ... K_{T-1}``.

    Q, R : ndarrays
        State and input weights.

    control_box : Box

    reference : ndarray of floats
        State regulated to (the center of the target set).

    costs : list of ndarrays (optional)
        Cost-to-go matrices ``P_0 ... P_T``.
    """

    kind = "lqg"

    def __init__(self, gains, Q, R, control_box, reference, costs=None):
        super().__init__(control_box)
        self.gains = gains
        self.Q = Q
        self.R = R
        self.reference = np.asarray(reference, dtype="float64")
        self.costs = costs

    def raw_input(self, k, x):
        """Feedback input before projection onto the control box."""
        return -self.gains[k] @ (np.asarray(x, dtype="float64") - self.reference)

    def _act(self, k, x):
        return self.raw_input(k, x)

    def metadata(self):
        return {
            "reference": self.reference.tolist(),
            "Q_diag": np.diag(self.Q).tolist(),
            "R_diag": np.diag(self.R).tolist(),
        }


def lqg_controller(problem):
    """
    LQG baseline of a problem with affine dynamics.

    The weights are the shape matrices of the largest ellipsoids inscribed
    in the boxes: ``Q = diag(1/r_l^2)`` with ``r`` the half-widths of ``K``
    (its bounding box when ``K`` is a union) and ``R = diag(1/rho_l^2)``
    with ``rho`` the half-widths of ``U``. The gains come from the Riccati
    recursion over the problem horizon.

    Parameters
    ----------
    problem : ReachAvoidProblem

    Returns
    -------
    controller : LqgController
    """
    kernel = problem.kernel
    maps = kernel.mean_maps
    if not all(isinstance(mm, AffineMeanMap) for mm in maps):
        raise UnsupportedError("The LQG baseline needs affine mean maps")
    A, B = maps[0].A, maps[0].B
    for mm in maps[1:]:
        if not (np.array_equal(mm.A, A) and np.array_equal(mm.B, B)):
            raise UnsupportedError("The LQG baseline needs a common (A, B) for all components")

    target = problem.target.bounding_box()
    r = target.half_widths
    rho = problem.control_box.half_widths
    if np.any(r <= 0.0) or np.any(rho <= 0.0):
        raise ValidationError("The target and control boxes need positive widths")
    if np.any(target.center != 0.0) or np.any(problem.control_box.center != 0.0):
        logger.warning(
            "Target or control set not centered at the origin; regulating to the "
            "target center %s with half-width weights",
            target.center.tolist(),
        )
    Q = np.diag(1.0 / r**2)
    R = np.diag(1.0 / rho**2)
    gains, costs = riccati_gains(A, B, Q, R, problem.horizon)
    return LqgController(gains, Q, R, problem.control_box, target.center, costs)
