import numpy as np

from reachadp.exceptions import ValidationError


class MeanMap(object):
    """
    Base class for the mean maps ``m(x, u)`` of Gaussian mixture components.

    Any new mean map should inherit from this class, and define its own
    `_evaluate` method, using the same signature as the method below.

    Parameters
    ----------
    state_dim, control_dim : int
        Dimensions of the state and control spaces.
    """

    is_affine = False

    def __init__(self, state_dim, control_dim):
        self.state_dim = int(state_dim)
        self.control_dim = int(control_dim)

    def _evaluate(self, x, u):
        """
        Returns the mean of the next state

        Parameters
        ----------
        x, u : ndarrays of floats
            States of shape ``(..., n)`` and controls of shape ``(..., m)``
            with broadcastable leading shapes.

        Returns
        -------
        mean : ndarray of floats, shape ``(..., n)``
        """
        # The base class only defines a dummy map
        # (This should be replaced by any class that inherits from this one.)
        return np.zeros(np.broadcast_shapes(x.shape[:-1], u.shape[:-1]) + (self.state_dim,))

    def evaluate(self, x, u):
        """
        Returns the mean of the next state, after checking dimensions.
        This is the public facing evaluate method, it calls the _evaluate function of the derived class.
        """
        x = np.asarray(x, dtype="float64")
        u = np.asarray(u, dtype="float64")
        if x.shape[-1] != self.state_dim or u.shape[-1] != self.control_dim:
            raise ValidationError(
                f"Mean map expects state/control dimensions {self.state_dim}/{self.control_dim}, "
                f"got {x.shape[-1]}/{u.shape[-1]}"
            )
        return self._evaluate(x, u)

    def to_dict(self):
        return {"type": "mean_map"}
