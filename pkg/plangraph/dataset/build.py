"""Labelled dataset instances: generation plus optimal and second-best plans."""

import logging
from dataclasses import dataclass, field
from typing import Optional

from ..core import Plan, TaskGraph, simulate
from ..errors import DegenerateGraphError
from ..evaluator import validate_plan
from ..graphgen import batch_jobs, build_task_graph, instance_meta
from ..metrics import CaseRecord
from ..solver import EXACT_THRESHOLD, Solution, solve
from ..utils.utils import _parallel_map, read_jsonl

logger = logging.getLogger(__name__)


def _solution_to_dict(solution):
    if solution is None:
        return None
    return {"plan": solution.plan.to_list(), **solution.to_dict()}


def _solution_from_dict(graph, obj):
    if obj is None:
        return None
    plan = Plan.from_list(obj["plan"])
    schedule = simulate(graph, plan)
    return Solution(
        plan=plan,
        makespan=obj["makespan"],
        cost=obj["cost"],
        rule_ids=tuple(obj["rule_ids"]),
        sum_end=sum(schedule.end_times.values()),
        exact=obj.get("exact", True),
    )


@dataclass(frozen=True)
class LabeledInstance:
    """A task graph with its labels.

    Parameters
    ----------
    graph : TaskGraph
        The task.
    optimal : Solution
        The gold plan.
    second_best : Solution | None
        The best plan with a different rule set, if any.
    meta : dict
        Node count, structure, edge relation, edge count and seed.
    query : str | None
        Textual form of the task, when one was generated.
    index : int
        Position in the dataset.
    """

    graph: TaskGraph
    optimal: Solution
    second_best: Optional[Solution] = None
    meta: dict = field(default_factory=dict)
    query: Optional[str] = None
    index: int = 0

    def __repr__(self):
        """Return a summary of the instance."""
        second = "none" if self.second_best is None else self.second_best.objective
        return (
            f"<LabeledInstance {self.index} | {len(self.graph.rules)} rules>\n"
            f"  Optimal: {self.optimal.objective}\n"
            f"  Second best: {second}\n"
        )

    def to_dict(self):
        """Serialise to one line of ``instances.jsonl``."""
        out = {
            "index": self.index,
            "graph": self.graph.to_dict(),
            "optimal": _solution_to_dict(self.optimal),
            "second_best": _solution_to_dict(self.second_best),
            "meta": dict(self.meta),
        }
        if self.query is not None:
            out["query"] = self.query
        return out

    @classmethod
    def from_dict(cls, obj):
        """Decode an instance written by :meth:`to_dict`."""
        graph = TaskGraph.from_dict(obj["graph"])
        return cls(
            graph=graph,
            optimal=_solution_from_dict(graph, obj["optimal"]),
            second_best=_solution_from_dict(graph, obj.get("second_best")),
            meta=obj.get("meta", {}),
            query=obj.get("query"),
            index=obj.get("index", 0),
        )


def label_instance(graph, meta=None, index=0, exact_threshold=EXACT_THRESHOLD):
    """Solve a task graph and wrap it with its labels."""
    optimal, second = solve(graph, second_best=True, exact_threshold=exact_threshold)
    return LabeledInstance(graph, optimal, second, dict(meta or {}), index=index)


def _label_one(job):
    (cfg, index, label), exact_threshold = job
    try:
        graph = build_task_graph(cfg)
    except DegenerateGraphError as exc:
        raise DegenerateGraphError(f"row {label}, instance {index}: {exc}") from exc
    return label_instance(graph, instance_meta(cfg, graph), index, exact_threshold)


def build_dataset(
    spec, master_seed=None, n_jobs=1, progress=False, exact_threshold=EXACT_THRESHOLD
):
    """Generate and label every instance of a dataset specification.

    Parameters
    ----------
    spec : DatasetSpec | list of DatasetRow
        The rows; ``samples`` instances are built per row.
    master_seed : int | None
        Master seed. Defaults to the seed of ``spec``.
    n_jobs : int | None
        Number of worker processes (None: all cores).
    progress : bool
        Show a progress bar on standard error.
    exact_threshold : int
        See :func:`plangraph.solver.optimal_plan`.

    Returns
    -------
    instances : list of LabeledInstance
        In row order; identical for identical ``spec`` and ``master_seed``.
    """
    rows = getattr(spec, "rows", spec)
    if master_seed is None:
        master_seed = getattr(spec, "seed", 0)
    jobs = [(job, exact_threshold) for job in batch_jobs(rows, master_seed)]
    instances = _parallel_map(
        _label_one, jobs, n_jobs=n_jobs, desc="Labelling" if progress else None
    )
    n_second = sum(inst.second_best is not None for inst in instances)
    logger.info(
        "Built %d instances (%d with a second-best plan)", len(instances), n_second
    )
    return instances


def read_instances(fname):
    """Read labelled instances from a JSONL file."""
    return [LabeledInstance.from_dict(obj) for obj in read_jsonl(fname)]


def optimal_label_records(instances):
    """Score every instance's own optimal plan.

    The resulting cases are all Optimal; grouped with
    :func:`~plangraph.metrics.aggregate_by` their ``Parallel Ratio`` column
    gives the parallel/sequential ratio of the gold labels per group.

    Parameters
    ----------
    instances : list of LabeledInstance
        The instances.

    Returns
    -------
    cases : list of CaseRecord
    """
    cases = []
    for inst in instances:
        verdict = validate_plan(inst.graph, inst.optimal.plan, inst.optimal.objective)
        cases.append(CaseRecord(verdict, inst.optimal.objective, inst.meta))
    return cases
