import numpy as np

from reachadp.exceptions import ValidationError

from .mean_map import MeanMap


class AffineMeanMap(MeanMap):
    """
    Affine mean map ``m(x, u) = A x + B u + offset``.

    Parameters
    ----------
    A : 2D array of floats, shape ``(n, n)``

    B : 2D array of floats, shape ``(n, m)``

    offset : list of scalars (optional)
        Constant shift of the mean, e.g. a non-zero noise mean. Defaults to zero.
    """

    is_affine = True

    def __init__(self, A, B, offset=None):
        A = np.atleast_2d(np.array(A, dtype="float64"))
        B = np.atleast_2d(np.array(B, dtype="float64"))
        n = A.shape[0]
        if A.shape != (n, n) or B.shape[0] != n:
            raise ValidationError(f"Inconsistent shapes A={A.shape}, B={B.shape}")
        super().__init__(n, B.shape[1])
        self.A = A
        self.B = B
        self.offset = (
            np.zeros(n) if offset is None else np.array(offset, dtype="float64").reshape(-1)
        )
        if self.offset.size != n:
            raise ValidationError(f"Offset has length {self.offset.size}, expected {n}")

    @classmethod
    def integrator(cls, n, offset=None):
        """``x + u + offset``, the single-integrator dynamics of the regulation benchmarks."""
        return cls(np.eye(n), np.eye(n), offset)

    def _evaluate(self, x, u):
        return x @ self.A.T + u @ self.B.T + self.offset

    def control_jacobian(self):
        return self.B

    def shifted(self, shift):
        """Same map with ``shift`` added to the offset."""
        return AffineMeanMap(self.A, self.B, self.offset + np.asarray(shift, dtype="float64"))

    def to_dict(self):
        return {
            "type": "affine",
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "offset": self.offset.tolist(),
        }
