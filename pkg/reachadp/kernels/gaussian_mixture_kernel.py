import numpy as np

from reachadp.basis import gaussian_interval_mass, union_masses
from reachadp.exceptions import ValidationError
from reachadp.utils.box import Box, BoxUnion

from .affine_mean_map import AffineMeanMap


class GaussianMixtureKernel:
    """
    Transition kernel whose density is a mixture of diagonal Gaussians.

    More precisely, the next state is distributed as:

    .. math::

        Q(dy | x, u) = \\sum_{j=1}^J \\alpha_j \\mathcal{N}(m_j(x, u), \\mathrm{diag}(\\sigma^2_j))

    Parameters
    ----------
    weights : list of scalars
        Mixture weights :math:`\\alpha_j`, non-negative and summing to one.

    mean_maps : list of MeanMap
        One mean map :math:`m_j` per component.

    variances : list of lists of scalars
        Per-dimension variances :math:`\\sigma^2_j` of each component,
        all strictly positive.
    """

    def __init__(self, weights, mean_maps, variances):
        weights = np.array(weights, dtype="float64").reshape(-1)
        variances = np.atleast_2d(np.array(variances, dtype="float64"))
        mean_maps = list(mean_maps)
        if not (len(weights) == len(mean_maps) == variances.shape[0]) or len(weights) == 0:
            raise ValidationError("Each mixture component needs a weight, a mean map and a variance")
        if np.any(weights < 0.0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValidationError(f"Mixture weights must be non-negative and sum to 1, got {weights}")
        if np.any(variances <= 0.0):
            raise ValidationError("Component variances must be strictly positive")
        self.state_dim = mean_maps[0].state_dim
        self.control_dim = mean_maps[0].control_dim
        for mm in mean_maps:
            if (mm.state_dim, mm.control_dim) != (self.state_dim, self.control_dim):
                raise ValidationError("All mean maps must share state and control dimensions")
        if variances.shape[1] != self.state_dim:
            raise ValidationError(
                f"Variances have dimension {variances.shape[1]}, expected {self.state_dim}"
            )
        self.weights = weights
        self.mean_maps = mean_maps
        self.variances = variances
        self._cum_weights = np.cumsum(weights)

    @classmethod
    def affine(cls, A, B, components, offset=None):
        """
        Mixture whose components share the affine map ``A x + B u + offset``.

        Parameters
        ----------
        A, B, offset :
            See :class:`AffineMeanMap`.

        components : list of (weight, mean_shift, variance)
            ``mean_shift`` is added to ``offset`` for that component.
        """
        base = AffineMeanMap(A, B, offset)
        weights, maps, variances = [], [], []
        for weight, shift, variance in components:
            weights.append(weight)
            maps.append(base.shifted(np.zeros(base.state_dim) if shift is None else shift))
            variances.append(np.broadcast_to(np.asarray(variance, dtype="float64"), (base.state_dim,)))
        return cls(weights, maps, variances)

    @classmethod
    def integrator(cls, n, variance, noise_mean=None):
        """Single Gaussian kernel of ``x + u + w`` with ``w ~ N(noise_mean, diag(variance))``."""
        return cls.affine(np.eye(n), np.eye(n), [(1.0, noise_mean, variance)])

    @property
    def n_components(self):
        return len(self.weights)

    @property
    def is_affine(self):
        return all(mm.is_affine for mm in self.mean_maps)

    def means(self, x, u):
        """
        Component means.

        Returns
        -------
        means : ndarray of shape ``(..., J, n)``
        """
        return np.stack([mm.evaluate(x, u) for mm in self.mean_maps], axis=-2)

    def sample_next(self, x, u, rng):
        """
        Draw the next state.

        A component is picked by inverse CDF on the cumulative weights
        (a draw exactly on a boundary goes to the lower index), then a
        diagonal Gaussian is sampled around its mean. Every call consumes
        exactly one uniform and ``n`` standard normal variates.

        Parameters
        ----------
        x, u : ndarrays of floats
            Single state ``(n,)`` and control ``(m,)``.

        rng : numpy.random.Generator

        Returns
        -------
        y : ndarray of floats, shape ``(n,)``
        """
        r = 1.0 - rng.random()
        z = rng.standard_normal(self.state_dim)
        j = self._component_index(r)
        mean = self.mean_maps[j].evaluate(x, u)
        return mean + np.sqrt(self.variances[j]) * z

    def sample_next_batch(self, x, u, rng):
        """Vectorized :meth:`sample_next` for states ``(N, n)`` and controls ``(N, m)``."""
        x = np.atleast_2d(x)
        u = np.atleast_2d(u)
        n_samples = max(x.shape[0], u.shape[0])
        r = 1.0 - rng.random(n_samples)
        z = rng.standard_normal((n_samples, self.state_dim))
        j = self._component_index(r)
        means = self.means(x, u)
        means = np.broadcast_to(means, (n_samples,) + means.shape[-2:])
        chosen = means[np.arange(n_samples), j]
        return chosen + np.sqrt(self.variances[j]) * z

    def _component_index(self, r):
        idx = np.searchsorted(self._cum_weights, r, side="left")
        return np.minimum(idx, self.n_components - 1)

    def box_probability(self, x, u, box):
        """
        Probability that the next state falls in ``box``.

        Parameters
        ----------
        x, u : ndarrays of floats
            State and control, single or batched.

        box : Box

        Returns
        -------
        probability : float or ndarray of floats, in [0, 1]
        """
        if box.dim != self.state_dim:
            raise ValidationError(f"Box dimension {box.dim} does not match state dimension {self.state_dim}")
        means = self.means(x, u)
        masses = np.prod(gaussian_interval_mass(box.lo, box.hi, means, self.variances), axis=-1)
        return masses @ self.weights

    def union_probability(self, x, u, bu):
        """Probability that the next state falls in the union ``bu``."""
        if isinstance(bu, Box):
            bu = BoxUnion.from_box(bu)
        means = self.means(x, u)
        variances = np.broadcast_to(self.variances, means.shape)
        return union_masses(bu, means, variances) @ self.weights

    def to_dict(self):
        return {
            "components": [
                {"weight": float(w), "variance": v.tolist(), "mean_map": mm.to_dict()}
                for w, v, mm in zip(self.weights, self.variances, self.mean_maps)
            ]
        }
