from .controller import Controller


class FunctionController(Controller):
    """
    Derived class wrapping a user-supplied decision rule ``func(k, x) -> u``.

    Parameters
    ----------
    control_box : Box

    func : callable
        Decision rule; its output is projected onto ``control_box``.
    """

    kind = "user"

    def __init__(self, control_box, func):
        super().__init__(control_box)
        self.func = func

    def _act(self, k, x):
        return self.func(k, x)
