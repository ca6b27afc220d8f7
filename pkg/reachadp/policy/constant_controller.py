import numpy as np

from reachadp.exceptions import ValidationError

from .controller import Controller


class ConstantController(Controller):
    """
    Derived class applying the same control at every stage and state.

    Parameters
    ----------
    control_box : Box

    u : list of scalars (optional)
        The control; defaults to the center of ``control_box``.
    """

    kind = "constant"

    def __init__(self, control_box, u=None):
        super().__init__(control_box)
        if u is None:
            u = control_box.center
        self.u = np.array(u, dtype="float64").reshape(-1)
        if self.u.size != control_box.dim:
            raise ValidationError(f"Control of size {self.u.size} for a {control_box.dim}D control box")

    def _act(self, k, x):
        return self.u.copy()
