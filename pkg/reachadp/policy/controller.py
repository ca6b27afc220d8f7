import numpy as np

from reachadp.utils.optimize import project


class Controller(object):
    """
    Base class for all controllers.

    Any new controller should inherit from this class, and define its own
    `_act` method, using the same signature as the method below. The
    returned control is always projected onto the control box.

    Parameters
    ----------
    control_box : Box
        The control space ``U``.
    """

    kind = "user"

    def __init__(self, control_box):
        self.control_box = control_box

    def act(self, k, x):
        """
        Returns the control to apply at stage ``k`` in state ``x``.

        Parameters
        ----------
        k : int
            Stage index, ``0 <= k < T``.

        x : ndarray of floats, shape ``(n,)``

        Returns
        -------
        u : ndarray of floats, shape ``(m,)``, inside the control box
        """
        u = self._act(k, np.asarray(x, dtype="float64"))
        return project(np.asarray(u, dtype="float64"), self.control_box)

    def __call__(self, k, x):
        return self.act(k, x)

    def _act(self, k, x):
        # The base class only applies the center of the control box
        # (This should be replaced by any class that inherits from this one.)
        return self.control_box.center.copy()
