from .affine_mean_map import AffineMeanMap
from .function_mean_map import FunctionMeanMap
from .gaussian_mixture_kernel import GaussianMixtureKernel
from .mean_map import MeanMap

__all__ = ["AffineMeanMap", "FunctionMeanMap", "GaussianMixtureKernel", "MeanMap"]
