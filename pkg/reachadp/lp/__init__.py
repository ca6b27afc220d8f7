from .instance import LpInstance, LpSolution, assemble
from .lp_text import read_lp, write_lp
from .simplex import solve

__all__ = ["LpInstance", "LpSolution", "assemble", "solve", "read_lp", "write_lp"]
