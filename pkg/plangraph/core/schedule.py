"""Parallel execution semantics of a plan and the plan comparison order."""

from dataclasses import dataclass, field

import networkx as nx

from ..errors import UnmatchedRuleError


@dataclass(frozen=True)
class ScheduleResult:
    """Outcome of executing a plan with unbounded parallelism.

    Parameters
    ----------
    end_times : dict
        Maps sub-plan name to its end time.
    makespan : int
        The largest end time (0 for an empty plan).
    total_cost : int
        Sum of the matched rules' costs, one charge per sub-plan.
    start_times : dict
        Maps sub-plan name to its start time.
    sequential_time : int
        Sum of the matched rules' durations, i.e. the makespan of running
        every sub-plan one after the other.
    """

    end_times: dict
    makespan: int
    total_cost: int
    start_times: dict = field(default_factory=dict)
    sequential_time: int = 0

    def to_dict(self):
        """Serialise to a JSON-compatible dict."""
        return {
            "makespan": self.makespan,
            "cost": self.total_cost,
            "sequential_time": self.sequential_time,
            "end_times": dict(self.end_times),
        }


def match_rules(graph, plan):
    """Map every sub-plan name to its rule.

    Raises
    ------
    UnmatchedRuleError
        For the first sub-plan without a rule of identical source set and target.
    """
    matched = {}
    for sub in plan:
        rule = graph.match(sub.source, sub.target)
        if rule is None:
            raise UnmatchedRuleError(
                sub.name,
                f"Sub-plan {sub.name!r} ({sorted(sub.source)} -> {sub.target}) "
                "matches no rule",
            )
        matched[sub.name] = rule
    return matched


def simulate(graph, plan):
    """Execute a plan under the end-time recursion.

    Each sub-plan starts when its last listed dependency ends (time 0 without
    dependencies) and ends after the duration of its matched rule.

    Parameters
    ----------
    graph : TaskGraph
        The task graph the plan's sub-plans are matched against.
    plan : Plan
        A structurally valid plan.

    Returns
    -------
    schedule : ScheduleResult

    Raises
    ------
    MalformedPlanError
        If the plan breaks its structural invariants.
    UnmatchedRuleError
        If a sub-plan has no matching rule.
    """
    plan.check_structure()
    matched = match_rules(graph, plan)
    start, end = {}, {}
    for name in nx.topological_sort(plan.dependency_graph):
        sub = plan.by_name[name]
        start[name] = max((end[dep] for dep in sub.dependencies), default=0)
        end[name] = start[name] + matched[name].time
    # emission order for stable output
    names = [sub.name for sub in plan]
    return ScheduleResult(
        end_times={name: end[name] for name in names},
        makespan=max(end.values(), default=0),
        total_cost=sum(matched[name].cost for name in names),
        start_times={name: start[name] for name in names},
        sequential_time=sum(matched[name].time for name in names),
    )


def compare_plans(a, b):
    """Compare two (makespan, cost) pairs.

    Smaller makespan wins; equal makespans are decided by smaller cost. With
    integer times and costs this is exactly the order of
    ``makespan + eps * cost`` for any small enough positive ``eps``.

    Parameters
    ----------
    a, b : tuple of int
        ``(makespan, cost)`` pairs.

    Returns
    -------
    ordering : int
        ``-1`` if ``a`` is preferred, ``1`` if ``b`` is preferred, ``0`` if equal.

    Examples
    --------
    >>> compare_plans((7, 4), (8, 2))
    -1
    >>> compare_plans((5, 9), (5, 3))
    1
    """
    a, b = (int(a[0]), int(a[1])), (int(b[0]), int(b[1]))
    return (a > b) - (a < b)
