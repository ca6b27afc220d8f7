from .suites import SUITES, example1_problem, example2_problem, run_suite

__all__ = ["SUITES", "example1_problem", "example2_problem", "run_suite"]
