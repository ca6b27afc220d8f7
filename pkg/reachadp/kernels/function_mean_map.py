import numpy as np

from .mean_map import MeanMap


class FunctionMeanMap(MeanMap):
    """
    Mean map given by an arbitrary (possibly nonlinear) user function.

    Parameters
    ----------
    func : callable
        ``func(x, u) -> mean`` for a single state ``(n,)`` and control ``(m,)``.

    state_dim, control_dim : int

    name : string (optional)
        Label used when the kernel is described or hashed.

    vectorized : bool (optional)
        Set when ``func`` already accepts batches ``(..., n)`` and ``(..., m)``.
    """

    def __init__(self, func, state_dim, control_dim, name="function", vectorized=False):
        super().__init__(state_dim, control_dim)
        self.func = func
        self.name = name
        self.vectorized = vectorized

    def _evaluate(self, x, u):
        if self.vectorized:
            return np.asarray(self.func(x, u), dtype="float64")
        shape = np.broadcast_shapes(x.shape[:-1], u.shape[:-1])
        xb = np.broadcast_to(x, shape + (self.state_dim,)).reshape(-1, self.state_dim)
        ub = np.broadcast_to(u, shape + (self.control_dim,)).reshape(-1, self.control_dim)
        out = np.array([self.func(xi, ui) for xi, ui in zip(xb, ub)], dtype="float64")
        return out.reshape(shape + (self.state_dim,))

    def to_dict(self):
        return {"type": "function", "name": self.name}
