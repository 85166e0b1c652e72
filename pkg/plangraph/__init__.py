# License: BSD (3-clause)

from . import utils

from .core import Plan, Rule, SubPlan, TaskGraph, read_plan, read_task_graph, simulate
from .evaluator import validate_plan
from .graphgen import GenConfig, build_task_graph
from .solver import optimal_plan, second_best_plan, solve

try:
    from importlib.metadata import version

    __version__ = version("plangraph")
except Exception:
    __version__ = "0.0.0"
