class ReachAdpError(Exception):
    """Base class for all errors raised by ``reachadp``."""


class ValidationError(ReachAdpError, ValueError):
    """Invalid input: inconsistent dimensions, malformed sets or configs."""


class DomainError(ReachAdpError, ValueError):
    """An operation is undefined on its input, e.g. sampling a zero-volume set."""


class StageStateError(ReachAdpError, RuntimeError):
    """A value function stage is used before its weights are available."""


class UnsupportedError(ReachAdpError, NotImplementedError):
    """The requested operation is not supported for this kind of input."""


class NumericalError(ReachAdpError, ArithmeticError):
    """The LP solver could not recover from numerical difficulties."""


class LpUnboundedError(ReachAdpError):
    """
    A stage LP is unbounded below.

    Parameters
    ----------
    message : string
        Human readable description.

    ray : ndarray of floats, optional
        Certified direction ``d`` with ``Phi d >= 0`` and ``c^T d < 0``.

    stage : int, optional
        Index of the stage whose LP is unbounded.
    """

    def __init__(self, message, ray=None, stage=None):
        super().__init__(message)
        self.ray = ray
        self.stage = stage
