import numpy as np


def project(u, box):
    """Clip controls (single or batched) onto a box."""
    return np.clip(u, box.lo, box.hi)


def projected_gradient_ascent(
    fun_and_grad, box, starts, tol=1e-7, max_iter=200, step0=None, shrink=0.5, c1=1e-4
):
    """
    Maximize a smooth function over a box from several starting points.

    All starts are iterated together: one batched call of ``fun_and_grad``
    per line-search trial. Each start takes projected gradient steps with
    an Armijo backtracking line search along the projection arc, and stops
    once its projected-gradient step is shorter than ``tol`` or after
    ``max_iter`` iterations.

    Parameters
    ----------
    fun_and_grad : callable
        ``fun_and_grad(U) -> (values, gradients)`` for a batch ``U`` of
        shape ``(S, m)``; returns arrays of shape ``(S,)`` and ``(S, m)``.

    box : Box
        Feasible set.

    starts : ndarray of floats, shape ``(S, m)``
        Starting points; they are projected onto the box first.

    tol : float
        Threshold on the norm of the projected-gradient step
        ``P(u + g) - u``.

    max_iter : int
        Iteration cap per start.

    step0 : float (optional)
        Initial step length; defaults to the box diameter.

    Returns
    -------
    u_best : ndarray of floats, shape ``(m,)``
        Best local maximizer found; ties go to the lowest start index.

    f_best : float
        Objective value at ``u_best``.
    """
    u = project(np.array(starts, dtype="float64"), box)
    if step0 is None:
        step0 = max(float(np.linalg.norm(box.hi - box.lo)), 1e-12)
    f, g = fun_and_grad(u)
    active = np.ones(len(u), dtype=bool)
    steps = np.full(len(u), float(step0))

    for _ in range(max_iter):
        pg = project(u + g, box) - u
        active &= np.linalg.norm(pg, axis=1) >= tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        t = np.minimum(steps[idx] / shrink, step0)
        accepted = np.zeros(idx.size, dtype=bool)
        u_new = u[idx].copy()
        f_new = f[idx].copy()
        g_new = g[idx].copy()
        for _ in range(60):
            pending = ~accepted
            if not pending.any():
                break
            sub = idx[pending]
            trial = project(u[sub] + t[pending, np.newaxis] * g[sub], box)
            f_trial, g_trial = fun_and_grad(trial)
            gain = f_trial - f[sub]
            needed = c1 * np.sum(g[sub] * (trial - u[sub]), axis=1)
            ok = gain >= needed
            pos = np.flatnonzero(pending)
            u_new[pos[ok]] = trial[ok]
            f_new[pos[ok]] = f_trial[ok]
            g_new[pos[ok]] = g_trial[ok]
            accepted[pos[ok]] = True
            t[pending] = np.where(ok, t[pending], t[pending] * shrink)
        u[idx] = u_new
        f[idx] = f_new
        g[idx] = g_new
        steps[idx] = t
        # Starts whose line search failed cannot make progress
        active[idx[~accepted]] = False

    best = int(np.argmax(f))
    return u[best], float(f[best])


def grid_search(fun, box, resolution):
    """
    Maximize ``fun`` over a regular grid of the box.

    Parameters
    ----------
    fun : callable
        ``fun(U) -> values`` for a batch ``(S, m)``.

    box : Box

    resolution : int
        Points per dimension (endpoints included).

    Returns
    -------
    u_best, f_best
    """
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(box.lo, box.hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.dim)
    values = fun(grid)
    best = int(np.argmax(values))
    return grid[best], float(values[best])
