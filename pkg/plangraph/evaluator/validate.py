"""Plan validation and failure classification."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import networkx as nx

from ..core import ErrorKind, ScheduleResult, simulate


class Status(str, Enum):
    """Outcome class of a plan."""

    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    FAILED = "Failed"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PlanVerdict:
    """Validation outcome of one plan.

    Parameters
    ----------
    status : Status
        ``Failed`` exactly when ``errors`` is non-empty.
    errors : frozenset of ErrorKind
        Every failure cause detected.
    schedule : ScheduleResult | None
        The plan's execution, for error-free plans.
    redundant_subtasks : frozenset of str
        Sub-plans that feed no producer of the target.
    messages : tuple of str
        Human-readable details of the errors.
    failure : str | None
        Set when no plan could be obtained at all (transport or parse
        failure); names the cause.
    """

    status: Status
    errors: frozenset = frozenset()
    schedule: Optional[ScheduleResult] = None
    redundant_subtasks: frozenset = frozenset()
    messages: tuple = ()
    failure: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        object.__setattr__(self, "errors", frozenset(ErrorKind(e) for e in self.errors))
        object.__setattr__(
            self, "redundant_subtasks", frozenset(self.redundant_subtasks)
        )
        if (self.status is Status.FAILED) != bool(self.errors):
            raise ValueError(
                f"Verdict status {self.status} is inconsistent "
                f"with errors {self.errors}"
            )
        if self.status is not Status.FAILED and self.schedule is None:
            raise ValueError(f"A {self.status} verdict needs a schedule")

    def __repr__(self):
        """Return a summary of the verdict."""
        if self.errors:
            detail = ", ".join(sorted(str(e) for e in self.errors))
        else:
            detail = f"makespan {self.makespan}, cost {self.cost}"
        return f"<PlanVerdict | {self.status}: {detail}>"

    @classmethod
    def failed(cls, kind, message, failure=None):
        """Build a failed verdict with a single cause."""
        return cls(
            Status.FAILED, frozenset([kind]), messages=(message,), failure=failure
        )

    @property
    def succeeded(self):
        """True for Optimal and Feasible verdicts."""
        return self.status is not Status.FAILED

    @property
    def makespan(self):
        """Makespan of the plan, or None if it failed."""
        return None if self.schedule is None else self.schedule.makespan

    @property
    def cost(self):
        """Total cost of the plan, or None if it failed."""
        return None if self.schedule is None else self.schedule.total_cost

    def to_dict(self):
        """Serialise to a JSON-compatible dict."""
        out = {
            "status": str(self.status),
            "errors": sorted(str(e) for e in self.errors),
            "makespan": self.makespan,
            "cost": self.cost,
            "redundant_subtasks": sorted(self.redundant_subtasks),
            "messages": list(self.messages),
        }
        if self.schedule is not None:
            out["sequential_time"] = self.schedule.sequential_time
        if self.failure is not None:
            out["failure"] = self.failure
        return out

    @classmethod
    def from_dict(cls, obj):
        """Decode a verdict written by :meth:`to_dict`.

        Only the makespan, cost and sequential time of the schedule are
        restored.
        """
        schedule = None
        if obj.get("makespan") is not None:
            schedule = ScheduleResult(
                end_times={},
                makespan=obj["makespan"],
                total_cost=obj["cost"],
                sequential_time=obj.get("sequential_time", 0),
            )
        return cls(
            status=Status(obj["status"]),
            errors=frozenset(ErrorKind(e) for e in obj.get("errors", ())),
            schedule=schedule,
            redundant_subtasks=frozenset(obj.get("redundant_subtasks", ())),
            messages=tuple(obj.get("messages", ())),
            failure=obj.get("failure"),
        )


def _objective(opt, graph):
    if opt is None:
        from ..solver import optimal_plan

        return optimal_plan(graph).objective
    if hasattr(opt, "objective"):
        return opt.objective
    makespan, cost = opt
    return int(makespan), int(cost)


def validate_plan(graph, plan, opt=None):
    """Validate a plan against a task graph.

    The checks run in this order: plan structure (malformed plans stop here,
    dependency cycles are recorded and checking goes on), rule existence of
    every sub-plan, availability of every source (initial, or produced by a
    listed dependency), and production of the target.

    Parameters
    ----------
    graph : TaskGraph
        The task graph.
    plan : Plan
        The candidate plan.
    opt : tuple of int | Solution | None
        The optimal ``(makespan, cost)``; solved on the fly when None.

    Returns
    -------
    verdict : PlanVerdict
    """
    errors = {}

    def add(kind, msg):
        errors.setdefault(kind, []).append(msg)

    for kind, msgs in plan.structure_errors().items():
        for msg in msgs:
            add(kind, msg)
    if ErrorKind.MALFORMED_PLAN in errors:
        return _failed(errors)

    by_name = plan.by_name
    for sub in plan:
        if graph.match(sub.source, sub.target) is None:
            add(
                ErrorKind.INVALID_SUBTASK,
                f"{sub.name}: no rule {sorted(sub.source)} -> {sub.target}",
            )
    for sub in plan:
        supplied = {by_name[dep].target for dep in sub.dependencies}
        for node in sorted(sub.source):
            if node not in graph.initial_sources and node not in supplied:
                add(
                    ErrorKind.UNAVAILABLE_SOURCE,
                    f"{sub.name}: source {node} is neither initial nor produced "
                    "by a listed dependency",
                )
    producers = [sub.name for sub in plan if sub.target == graph.target]
    if not producers:
        add(ErrorKind.TARGET_NOT_REACHED, f"no sub-plan produces {graph.target}")
    if errors:
        return _failed(errors)

    schedule = simulate(graph, plan)
    status = (
        Status.OPTIMAL
        if (schedule.makespan, schedule.total_cost) == _objective(opt, graph)
        else Status.FEASIBLE
    )
    useful = set(producers)
    for name in producers:
        useful |= nx.ancestors(plan.dependency_graph, name)
    return PlanVerdict(
        status=status,
        schedule=schedule,
        redundant_subtasks=frozenset(
            sub.name for sub in plan if sub.name not in useful
        ),
    )


def _failed(errors):
    messages = tuple(msg for kind in ErrorKind for msg in errors.get(kind, ()))
    return PlanVerdict(Status.FAILED, frozenset(errors), messages=messages)


def error_proportions(verdicts):
    """Fraction of verdicts reporting each error kind.

    A verdict with several error kinds counts once for each of them.

    Parameters
    ----------
    verdicts : list of PlanVerdict
        The verdicts.

    Returns
    -------
    proportions : dict
        Maps every :class:`~plangraph.core.ErrorKind` to a float in [0, 1].
    """
    verdicts = list(verdicts)
    out = {kind: 0.0 for kind in ErrorKind}
    if not verdicts:
        return out
    for kind in ErrorKind:
        out[kind] = sum(kind in v.errors for v in verdicts) / len(verdicts)
    return out
