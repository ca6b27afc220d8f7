import numpy as np

from reachadp.basis import gaussian_density, gaussian_interval_mass
from reachadp.exceptions import StageStateError, UnsupportedError, ValidationError
from reachadp.utils.box import subtract
from reachadp.utils.optimize import projected_gradient_ascent

# Upper bound on the number of floats in one (rows, J, M, boxes, n) block
_CHUNK_FLOATS = 2_000_000


class ValueFunction:
    """
    Value function on the three regions of the state space.

    It equals 1 on the target set ``K``, the weighted GRBF sum of ``stage``
    on ``K' \\ K`` and 0 outside ``K'``. Without a stage it is the terminal
    value function, the indicator of ``K``.

    Parameters
    ----------
    target, safe : BoxUnion
        The sets ``K`` and ``K'``.

    stage : GrbfStage (optional)
        Solved stage; ``None`` for the terminal indicator.

    xbar : BoxUnion (optional)
        Disjoint decomposition of ``K' \\ K``. Computed when not given.
    """

    def __init__(self, target, safe, stage=None, xbar=None):
        self.target = target
        self.safe = safe
        self.stage = stage
        self.xbar = subtract(safe, target) if xbar is None else xbar

    @classmethod
    def terminal(cls, problem):
        return cls(problem.target, problem.safe, None, problem.xbar)

    @classmethod
    def from_stage(cls, problem, stage):
        return cls(problem.target, problem.safe, stage, problem.xbar)

    @property
    def is_terminal(self):
        return self.stage is None

    def _check_ready(self):
        if self.stage is not None and not self.stage.has_weights():
            raise StageStateError(f"Stage {self.stage.k} has no weights yet")

    def evaluate(self, x):
        """Pointwise value, for one point ``(n,)`` or a batch ``(N, n)``."""
        self._check_ready()
        x = np.asarray(x, dtype="float64")
        in_target = self.target.contains(x)
        if self.stage is None:
            return np.where(in_target, 1.0, 0.0)[()]
        in_safe = self.safe.contains(x)
        inner = self.stage.evaluate(x)
        return np.where(in_target, 1.0, np.where(in_safe, inner, 0.0))[()]


def apply(v, q, x, u):
    """
    Expected next value ``T_u[V](x) = int V(y) Q(dy | x, u)``.

    Each basis element times each kernel component is a product of GRBFs,
    whose mass over the boxes of ``K' \\ K`` has a closed form; the value 1
    on ``K`` contributes the kernel mass of ``K``.

    Parameters
    ----------
    v : ValueFunction

    q : GaussianMixtureKernel

    x, u : ndarrays of floats
        One state ``(n,)`` and control ``(m,)``, or batches ``(N, n)`` and
        ``(N, m)`` (broadcast against each other).

    Returns
    -------
    value : float or ndarray of floats
    """
    values, _ = _evaluate(v, q, x, u, with_grad=False)
    return values


def gradient_u(v, q, x, u, allow_finite_difference=False):
    """
    Gradient of :func:`apply` with respect to the control.

    Analytic for kernels whose mean maps are all affine. For other kernels
    a central finite difference with step ``1e-6 * (1 + |u|)`` is used when
    ``allow_finite_difference`` is set.

    Returns
    -------
    grad : ndarray of floats, shape ``(m,)`` or ``(N, m)``
    """
    if q.is_affine:
        _, grad = _evaluate(v, q, x, u, with_grad=True)
        return grad
    if not allow_finite_difference:
        raise UnsupportedError(
            "Analytic control gradients need affine mean maps; "
            "pass allow_finite_difference=True for other kernels"
        )
    return _finite_difference_gradient(v, q, x, u)


def value_and_gradient_u(v, q, x, u, allow_finite_difference=False):
    """:func:`apply` and :func:`gradient_u` in one pass."""
    if q.is_affine:
        return _evaluate(v, q, x, u, with_grad=True)
    if not allow_finite_difference:
        raise UnsupportedError(
            "Analytic control gradients need affine mean maps; "
            "pass allow_finite_difference=True for other kernels"
        )
    return apply(v, q, x, u), _finite_difference_gradient(v, q, x, u)


def apply_max(v, q, x, control_box, rng, n_starts=10, tol=1e-7, max_iter=200):
    """
    ``T[V](x) = max_u T_u[V](x)`` by multistart projected gradient ascent.

    Parameters
    ----------
    v, q : ValueFunction, GaussianMixtureKernel

    x : ndarray of floats, shape ``(n,)``

    control_box : Box

    rng : numpy.random.Generator
        Source of the uniform starting points.

    n_starts : int
        Uniform starts, in addition to the box center.

    Returns
    -------
    u_best : ndarray of floats

    value : float
    """
    x = np.asarray(x, dtype="float64")
    starts = np.vstack(
        [
            control_box.center[np.newaxis, :],
            control_box.lo + control_box.widths * rng.random((n_starts, control_box.dim)),
        ]
    )

    def fun_and_grad(U):
        return value_and_gradient_u(v, q, x, U, allow_finite_difference=True)

    return projected_gradient_ascent(
        fun_and_grad, control_box, starts, tol=tol, max_iter=max_iter
    )


def _finite_difference_gradient(v, q, x, u):
    u = np.asarray(u, dtype="float64")
    x = np.asarray(x, dtype="float64")
    single = u.ndim == 1 and x.ndim == 1
    U = np.atleast_2d(u)
    grad = np.zeros(np.broadcast_shapes(np.atleast_2d(x).shape[:-1], U.shape[:-1]) + (U.shape[-1],))
    for d in range(U.shape[-1]):
        h = 1e-6 * (1.0 + np.abs(U[..., d]))
        e = np.zeros(U.shape[-1])
        e[d] = 1.0
        up = U + h[..., np.newaxis] * e
        down = U - h[..., np.newaxis] * e
        grad[..., d] = (apply(v, q, x, up) - apply(v, q, x, down)) / (2.0 * h)
    return grad[0] if single else grad


def _evaluate(v, q, x, u, with_grad):
    v._check_ready()
    x = np.asarray(x, dtype="float64")
    u = np.asarray(u, dtype="float64")
    if x.shape[-1] != q.state_dim or u.shape[-1] != q.control_dim:
        raise ValidationError("State/control dimensions do not match the kernel")
    single = x.ndim == 1 and u.ndim == 1
    X = np.atleast_2d(x)
    U = np.atleast_2d(u)
    rows = np.broadcast_shapes(X.shape[:-1], U.shape[:-1])[0]
    X = np.broadcast_to(X, (rows, X.shape[-1]))
    U = np.broadcast_to(U, (rows, U.shape[-1]))

    n_boxes = max(len(v.xbar), len(v.target), 1)
    per_row = q.n_components * (1 if v.stage is None else v.stage.size) * n_boxes * q.state_dim
    chunk = max(1, _CHUNK_FLOATS // max(per_row, 1))

    values = np.empty(rows)
    grads = np.empty((rows, q.control_dim)) if with_grad else None
    for start in range(0, rows, chunk):
        sl = slice(start, min(start + chunk, rows))
        means = q.means(X[sl], U[sl])
        val, grad_m = _terms(v, q, means, with_grad)
        values[sl] = val
        if with_grad:
            # chain rule through m_j(x, u) = A x + B_j u + offset_j
            grads[sl] = sum(
                grad_m[:, j, :] @ q.mean_maps[j].control_jacobian()
                for j in range(q.n_components)
            )
    if single:
        return float(values[0]), (grads[0] if with_grad else None)
    return values, grads


def _terms(v, q, means, with_grad):
    """
    Value (and gradient with respect to the component means) for means of
    shape ``(P, J, n)``.
    """
    sigma2 = q.variances  # (J, n)
    alpha = q.weights  # (J,)

    # Kernel mass of K
    target_mass, target_dm = _box_masses(v.target, means, sigma2, with_grad)
    value = target_mass @ alpha
    grad_m = target_dm * alpha[np.newaxis, :, np.newaxis] if with_grad else None

    if v.stage is None or v.xbar.is_empty():
        return value, grad_m

    c = v.stage.centers  # (M, n)
    s = v.stage.variances  # (M, n)
    w = v.stage.weights  # (M,)
    m = means[:, :, np.newaxis, :]  # (P, J, 1, n)
    total = s + sigma2[:, np.newaxis, :]  # (J, M, n)
    # product of phi_i with the density of component j
    gamma_l = gaussian_density(c, m, total)  # (P, J, M, n)
    gamma = np.prod(gamma_l, axis=-1)
    p_center = (c * sigma2[:, np.newaxis, :] + m * s) / total
    p_var = s * sigma2[:, np.newaxis, :] / total
    mass, mass_dpc = _box_masses(v.xbar, p_center, p_var, with_grad)  # (P, J, M)
    stage_terms = gamma * mass
    value = value + (stage_terms @ w) @ alpha

    if with_grad:
        dpc_dm = s / total  # (J, M, n)
        dlog_gamma = (c - m) / total  # (P, J, M, n)
        d_terms = gamma[..., np.newaxis] * (
            dlog_gamma * mass[..., np.newaxis] + mass_dpc * dpc_dm
        )
        grad_m = grad_m + np.einsum("pjmn,m,j->pjn", d_terms, w, alpha)
    return value, grad_m


def _box_masses(bu, centers, variances, with_grad):
    """
    Gaussian masses of a union of boxes, and their derivatives in the centers.

    Parameters
    ----------
    centers : ndarray of shape ``(..., n)``
    variances : ndarray broadcastable to ``centers``

    Returns
    -------
    mass : ndarray of shape ``(...)``
    dmass : ndarray of shape ``(..., n)`` or None
    """
    shape = np.shape(centers)
    if bu.is_empty():
        return np.zeros(shape[:-1]), (np.zeros(shape) if with_grad else None)
    c = centers[..., np.newaxis, :]
    var = np.asarray(variances)[..., np.newaxis, :]
    h = gaussian_interval_mass(bu.lo, bu.hi, c, var)  # (..., B, n)
    mass = np.prod(h, axis=-1).sum(axis=-1)
    if not with_grad:
        return mass, None
    dh = gaussian_density(bu.lo, c, var) - gaussian_density(bu.hi, c, var)
    n = shape[-1]
    dmass = np.empty(shape)
    for l in range(n):
        others = np.prod(np.delete(h, l, axis=-1), axis=-1)
        dmass[..., l] = (others * dh[..., l]).sum(axis=-1)
    return mass, dmass
