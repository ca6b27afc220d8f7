from .adp_controller import AdpController, act
from .constant_controller import ConstantController
from .controller import Controller
from .function_controller import FunctionController
from .rollout import RolloutResult, empirical_probability, rollout

__all__ = [
    "AdpController",
    "ConstantController",
    "Controller",
    "FunctionController",
    "RolloutResult",
    "act",
    "empirical_probability",
    "rollout",
]
