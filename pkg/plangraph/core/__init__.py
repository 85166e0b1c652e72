"""Domain types, execution semantics and plan comparison."""

from .graph import (
    Rule,
    TaskGraph,
    is_node_id,
    node_sort_key,
    read_task_graph,
    sorted_nodes,
)
from .plan import ErrorKind, Plan, SubPlan, read_plan
from .schedule import ScheduleResult, compare_plans, match_rules, simulate
