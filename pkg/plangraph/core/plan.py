"""Plans, sub-plans and their structural checks."""

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import networkx as nx

from ..errors import MalformedPlanError, SchemaMismatchError
from ._schema import _single, validate_plan_document
from .graph import sorted_nodes


class ErrorKind(str, Enum):
    """Failure taxa reported for a plan."""

    INVALID_SUBTASK = "InvalidSubtask"
    UNAVAILABLE_SOURCE = "UnavailableSource"
    CYCLIC_DEPENDENCIES = "CyclicDependencies"
    MALFORMED_PLAN = "MalformedPlan"
    TARGET_NOT_REACHED = "TargetNotReached"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SubPlan:
    """One rule application with its explicit dependencies.

    Parameters
    ----------
    name : str
        Name of the sub-plan, unique within its plan.
    source : frozenset of str
        The source nodes consumed.
    target : str
        The node produced.
    dependencies : tuple of str
        Names of the sub-plans that must finish first.
    """

    name: str
    source: frozenset
    target: str
    dependencies: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "source", frozenset(self.source))
        object.__setattr__(self, "dependencies", tuple(self.dependencies))

    def to_dict(self):
        """Serialise with the wire field order."""
        return {
            "name": self.name,
            "source": sorted_nodes(self.source),
            "target": [self.target],
            "dependencies": list(self.dependencies),
        }


@dataclass(frozen=True)
class Plan:
    """An ordered collection of sub-plans.

    Structural invariants (unique names, resolvable and acyclic dependencies)
    are not enforced on construction so that malformed model output can be
    represented; see :meth:`structure_errors` and :meth:`check_structure`.

    Parameters
    ----------
    subtasks : tuple of SubPlan
        The sub-plans, in emission order.
    """

    subtasks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "subtasks", tuple(self.subtasks))

    def __len__(self):
        return len(self.subtasks)

    def __iter__(self):
        return iter(self.subtasks)

    def __repr__(self):
        """Return a summary of the plan."""
        steps = ", ".join(
            f"{'+'.join(sorted_nodes(sub.source))}->{sub.target}" for sub in self
        )
        return f"<Plan | {len(self)} subtasks: {steps}>"

    @cached_property
    def by_name(self):
        """Map sub-plan name to sub-plan (last one wins on duplicates)."""
        return {sub.name: sub for sub in self.subtasks}

    def structure_errors(self):
        """Collect structural problems.

        Returns
        -------
        errors : dict
            Maps :class:`ErrorKind` (``MALFORMED_PLAN`` or
            ``CYCLIC_DEPENDENCIES``) to a list of messages. Empty if the plan is
            structurally valid.
        """
        errors = {}

        def add(kind, msg):
            errors.setdefault(kind, []).append(msg)

        counts = Counter(sub.name for sub in self.subtasks)
        for name, count in counts.items():
            if count > 1:
                add(
                    ErrorKind.MALFORMED_PLAN,
                    f"sub-plan name {name!r} used {count} times",
                )
        for sub in self.subtasks:
            if not sub.name:
                add(ErrorKind.MALFORMED_PLAN, "empty sub-plan name")
            if not sub.source:
                add(ErrorKind.MALFORMED_PLAN, f"{sub.name!r} has no source")
            if len(set(sub.dependencies)) != len(sub.dependencies):
                add(ErrorKind.MALFORMED_PLAN, f"{sub.name!r} repeats a dependency")
            for dep in sub.dependencies:
                if dep not in counts:
                    add(
                        ErrorKind.MALFORMED_PLAN,
                        f"{sub.name!r} depends on unknown {dep!r}",
                    )
        if not nx.is_directed_acyclic_graph(self.dependency_graph):
            cycle = nx.find_cycle(self.dependency_graph)
            names = " -> ".join(str(edge[0]) for edge in cycle)
            add(ErrorKind.CYCLIC_DEPENDENCIES, f"dependency cycle {names}")
        return errors

    def check_structure(self):
        """Raise :class:`~plangraph.errors.MalformedPlanError` if malformed."""
        errors = self.structure_errors()
        if errors:
            messages = [msg for msgs in errors.values() for msg in msgs]
            raise MalformedPlanError("; ".join(messages))

    @cached_property
    def dependency_graph(self):
        """Dependency relation as a DiGraph with edges dependency -> dependent.

        Dependencies naming unknown sub-plans are left out.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(sub.name for sub in self.subtasks)
        names = set(graph.nodes)
        for sub in self.subtasks:
            graph.add_edges_from(
                (dep, sub.name) for dep in sub.dependencies if dep in names
            )
        return graph

    def to_list(self):
        """Serialise to the wire JSON array."""
        return [sub.to_dict() for sub in self.subtasks]

    def to_json(self, indent=4):
        """Serialise to a JSON string (pretty-printed by default)."""
        return json.dumps(self.to_list(), indent=indent)

    @classmethod
    def from_list(cls, obj):
        """Decode a plan array.

        Parameters
        ----------
        obj : list of dict
            Each element carries ``name``, ``source``, ``target`` (a node or a
            one-element list) and ``dependencies``.

        Returns
        -------
        plan : Plan

        Raises
        ------
        SchemaMismatchError
            Naming the offending element and field.
        """
        models = validate_plan_document(obj)
        subtasks = []
        for ii, model in enumerate(models):
            try:
                target = _single(model.target, f"element {ii}: target")
            except SchemaMismatchError as exc:
                exc.index = ii
                raise
            subtasks.append(
                SubPlan(
                    name=model.name,
                    source=frozenset(model.source),
                    target=target,
                    dependencies=tuple(model.dependencies),
                )
            )
        return cls(tuple(subtasks))

    @classmethod
    def from_json(cls, text):
        """Decode a plan from a JSON string."""
        return cls.from_list(json.loads(text))


def read_plan(fname):
    """Read a plan from a JSON file.

    Parameters
    ----------
    fname : path-like
        The JSON file holding the plan array.

    Returns
    -------
    plan : Plan
    """
    with open(fname, encoding="utf-8") as fid:
        return Plan.from_list(json.load(fid))
