from .adp import SynthesisParams, ValueStack, synthesize
from .problem import ReachAvoidProblem

__all__ = ["ReachAvoidProblem", "SynthesisParams", "ValueStack", "synthesize"]
