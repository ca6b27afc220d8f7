import numpy as np
from scipy.special import erf as _scipy_erf
from scipy.special import erfc

from reachadp.exceptions import StageStateError, ValidationError
from reachadp.utils.box import Box, BoxUnion

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def erf(x):
    """
    Error function ``erf(x) = 2/sqrt(pi) * int_0^x exp(-t^2) dt``.

    This is the single error function used throughout the package; it
    delegates to ``scipy.special.erf`` whose absolute error is below 1e-15.

    Parameters
    ----------
    x : scalar or ndarray of floats

    Returns
    -------
    value : scalar or ndarray of floats, in (-1, 1)
    """
    return _scipy_erf(x)


def gaussian_interval_mass(lo, hi, mean, variance):
    """
    Mass of the 1D Gaussian ``N(mean, variance)`` on ``[lo, hi]``.

    Computed as ``0.5 * (erf((hi - m)/sqrt(2 s)) - erf((lo - m)/sqrt(2 s)))``.
    When both ends lie on the same side of the mean the complementary error
    function is used, so that far-tail masses keep their relative accuracy.
    All arguments broadcast against each other.
    """
    scale = _SQRT2 * np.sqrt(variance)
    a = (np.asarray(lo) - mean) / scale
    b = (np.asarray(hi) - mean) / scale
    upper_tail = 0.5 * (erfc(a) - erfc(b))
    lower_tail = 0.5 * (erfc(-b) - erfc(-a))
    central = 0.5 * (erf(b) - erf(a))
    mass = np.where(a >= 0.0, upper_tail, np.where(b <= 0.0, lower_tail, central))
    return np.maximum(mass, 0.0)


def gaussian_density(x, mean, variance):
    """1D Gaussian density, broadcasting over all arguments."""
    return _INV_SQRT_2PI / np.sqrt(variance) * np.exp(-0.5 * (x - mean) ** 2 / variance)


class Grbf:
    """
    Gaussian radial basis function with diagonal covariance.

    More precisely, the function corresponds to:

    .. math::

        \\phi(x) = \\gamma \\prod_{l=1}^n \\frac{1}{\\sqrt{2\\pi s_l}}
        \\exp\\left(-\\frac{(x_l - c_l)^2}{2 s_l}\\right)

    Parameters
    ----------
    center : list of scalars
        The center :math:`c`, one element per state dimension.

    variance : list of scalars
        The per-dimension variances :math:`s`, all strictly positive.

    scale : float (optional)
        The scale :math:`\\gamma`. Basis elements use 1; products of GRBFs
        carry the accumulated scale.
    """

    def __init__(self, center, variance, scale=1.0):
        self.center = np.array(center, dtype="float64").reshape(-1)
        self.variance = np.array(variance, dtype="float64").reshape(-1)
        if self.center.shape != self.variance.shape:
            raise ValidationError("Grbf center and variance must have equal length")
        if np.any(self.variance <= 0.0):
            raise ValidationError("Grbf variances must be strictly positive")
        if scale < 0.0:
            raise ValidationError("Grbf scale must be non-negative")
        self.scale = float(scale)

    @property
    def dim(self):
        return self.center.size

    def peak(self):
        """Value at the center, the maximum of the function."""
        return self.scale * float(np.prod(_INV_SQRT_2PI / np.sqrt(self.variance)))

    def evaluate(self, x):
        return eval_grbf(self, x)

    def __repr__(self):
        return (
            f"Grbf(center={self.center.tolist()}, variance={self.variance.tolist()}, "
            f"scale={self.scale!r})"
        )


def eval_grbf(g, x):
    """
    Evaluate a GRBF at one point ``(n,)`` or a batch of points ``(N, n)``.
    """
    x = np.asarray(x, dtype="float64")
    if x.shape[-1] != g.dim:
        raise ValidationError(f"Point dimension {x.shape[-1]} does not match Grbf dimension {g.dim}")
    return g.scale * np.prod(gaussian_density(x, g.center, g.variance), axis=-1)


def product(g1, g2):
    """
    Product of two GRBFs, which is again a GRBF.

    Per dimension the product has center ``(c1 s2 + c2 s1)/(s1 + s2)``,
    variance ``s1 s2/(s1 + s2)`` and picks up the factor
    ``N(c1; c2, s1 + s2)`` in its scale, so that
    ``eval(product(g1, g2), x) == eval(g1, x) * eval(g2, x)``.
    """
    if g1.dim != g2.dim:
        raise ValidationError(f"Dimension mismatch: {g1.dim} vs {g2.dim}")
    center, variance, factor = product_parameters(
        g1.center, g1.variance, g2.center, g2.variance
    )
    scale = g1.scale * g2.scale * float(np.prod(factor, axis=-1))
    return Grbf(center, variance, scale)


def product_parameters(c1, s1, c2, s2):
    """
    Broadcasting form of :func:`product`.

    Returns
    -------
    center, variance : ndarrays
        Per-dimension parameters of the product.

    factor : ndarray
        Per-dimension scale factors, to be multiplied over the last axis.
    """
    total = s1 + s2
    center = (c1 * s2 + c2 * s1) / total
    variance = s1 * s2 / total
    factor = gaussian_density(c1, c2, total)
    return center, variance, factor


def box_integral(g, bu):
    """
    Integral of a GRBF over a union of boxes (Lebesgue measure).

    Parameters
    ----------
    g : Grbf

    bu : BoxUnion or Box

    Returns
    -------
    integral : float, in ``[0, g.scale]``
    """
    if isinstance(bu, Box):
        bu = BoxUnion.from_box(bu)
    if bu.dim != g.dim:
        raise ValidationError(f"Dimension mismatch: {g.dim} vs {bu.dim}")
    if bu.is_empty():
        return 0.0
    masses = gaussian_interval_mass(bu.lo, bu.hi, g.center, g.variance)
    return g.scale * float(np.sum(np.prod(masses, axis=-1)))


def union_masses(bu, centers, variances):
    """
    Gaussian masses of many diagonal Gaussians over a union of boxes.

    Parameters
    ----------
    bu : BoxUnion

    centers, variances : ndarrays of shape ``(..., n)``

    Returns
    -------
    masses : ndarray of shape ``(...)``
    """
    if bu.is_empty():
        return np.zeros(np.shape(centers)[:-1])
    c = centers[..., np.newaxis, :]
    s = variances[..., np.newaxis, :]
    per_dim = gaussian_interval_mass(bu.lo, bu.hi, c, s)
    return np.prod(per_dim, axis=-1).sum(axis=-1)


class GrbfStage:
    """
    The basis of one stage, together with its weights once solved.

    Parameters
    ----------
    elements : list of Grbf
        Basis elements; their scale must be 1.

    k : int
        Stage index.

    weights : list of scalars (optional)
        One weight per element. Left as ``None`` until the stage LP is solved.
    """

    def __init__(self, elements, k, weights=None):
        elements = list(elements)
        if not elements:
            raise ValidationError("A stage needs at least one basis element")
        dim = elements[0].dim
        for g in elements:
            if g.dim != dim:
                raise ValidationError("All basis elements of a stage must share a dimension")
            if g.scale != 1.0:
                raise ValidationError("Stage basis elements must have unit scale")
        self.elements = elements
        self.k = int(k)
        self.centers = np.array([g.center for g in elements])
        self.variances = np.array([g.variance for g in elements])
        self.weights = None
        if weights is not None:
            self.set_weights(weights)

    @classmethod
    def from_arrays(cls, centers, variances, k, weights=None):
        elements = [Grbf(c, s) for c, s in zip(centers, variances)]
        return cls(elements, k, weights)

    @property
    def dim(self):
        return self.centers.shape[1]

    @property
    def size(self):
        return self.centers.shape[0]

    def __len__(self):
        return self.size

    def has_weights(self):
        return self.weights is not None

    def set_weights(self, weights):
        weights = np.array(weights, dtype="float64").reshape(-1)
        if weights.size != self.size:
            raise ValidationError(
                f"Expected {self.size} weights, got {weights.size}"
            )
        self.weights = weights

    def design_matrix(self, x):
        """
        Evaluate every basis element at the points ``x``.

        Parameters
        ----------
        x : ndarray of floats, shape ``(N, n)`` or ``(n,)``

        Returns
        -------
        phi : ndarray of shape ``(N, M)`` (or ``(M,)`` for a single point)
        """
        x = np.asarray(x, dtype="float64")
        if x.shape[-1] != self.dim:
            raise ValidationError(f"Point dimension {x.shape[-1]} does not match stage dimension {self.dim}")
        dens = gaussian_density(x[..., np.newaxis, :], self.centers, self.variances)
        return np.prod(dens, axis=-1)

    def evaluate(self, x):
        """Weighted sum ``sum_i w_i phi_i(x)`` at one point or a batch."""
        if self.weights is None:
            raise StageStateError(f"Stage {self.k} has no weights yet")
        return self.design_matrix(x) @ self.weights

    def box_integrals(self, bu):
        """Vector of ``int_bu phi_i dx`` for all elements."""
        if bu.dim != self.dim:
            raise ValidationError(f"Dimension mismatch: {self.dim} vs {bu.dim}")
        return union_masses(bu, self.centers, self.variances)
