from .grid_dp import GridController, GridValue, grid_dp
from .lqg import LqgController, lqg_controller

__all__ = ["GridController", "GridValue", "LqgController", "grid_dp", "lqg_controller"]
