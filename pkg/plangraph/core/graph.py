"""Task graphs: rules, queries and their invariants."""

import json
import re
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from ..errors import InvariantViolationError, SchemaMismatchError
from ._schema import NODE_PATTERN, _single, validate_graph_document

_NODE_RE = re.compile(NODE_PATTERN)


def is_node_id(label):
    """Return True if ``label`` is a node label such as ``"N12"``."""
    return isinstance(label, str) and _NODE_RE.match(label) is not None


def node_sort_key(label):
    """Sort node labels by their number (``N2`` before ``N10``)."""
    return int(label[1:])


def sorted_nodes(nodes):
    """Return the node labels sorted by number."""
    return sorted(nodes, key=node_sort_key)


def _check_node(label, where):
    if not is_node_id(label):
        raise InvariantViolationError(
            "node-label", f"{where} has invalid node label {label!r}"
        )


@dataclass(frozen=True)
class Rule:
    """A transformation: once every source is achieved, produce the target.

    Parameters
    ----------
    id : int
        Non-negative rule identifier, unique within a task graph.
    source : frozenset of str
        The prerequisite nodes.
    target : str
        The produced node.
    time : int
        Duration of the transformation (>= 1).
    cost : int
        Cost of the transformation (>= 1).
    """

    id: int
    source: frozenset
    target: str
    time: int
    cost: int

    def __post_init__(self):
        object.__setattr__(self, "source", frozenset(self.source))
        if isinstance(self.id, bool) or not isinstance(self.id, int) or self.id < 0:
            raise InvariantViolationError("rule-id", f"bad rule id {self.id!r}")
        if not self.source:
            raise InvariantViolationError(
                "rule-source", f"rule {self.id} has no source"
            )
        for node in self.source:
            _check_node(node, f"rule {self.id} source")
        _check_node(self.target, f"rule {self.id} target")
        if self.target in self.source:
            raise InvariantViolationError(
                "rule-source",
                f"rule {self.id} lists its target {self.target} as source",
            )
        for name in ("time", "cost"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvariantViolationError(
                    f"rule-{name}", f"rule {self.id} has {name} {value!r}, need >= 1"
                )

    @property
    def key(self):
        """The (source set, target) identity used to match sub-plans."""
        return self.source, self.target

    def to_dict(self):
        """Serialise with the wire field order."""
        return {
            "id": self.id,
            "source": sorted_nodes(self.source),
            "target": [self.target],
            "time": self.time,
            "cost": self.cost,
        }


@dataclass(frozen=True)
class TaskGraph:
    """A complete task instance: rules plus the query (initial sources, target).

    The constructor checks every invariant and raises
    :class:`~plangraph.errors.InvariantViolationError` on the first violation.

    Parameters
    ----------
    rules : tuple of Rule
        The transformation rules, with unique ids.
    initial_sources : frozenset of str
        The nodes available at time 0.
    target : str
        The node to obtain.
    """

    rules: tuple
    initial_sources: frozenset
    target: str

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "initial_sources", frozenset(self.initial_sources))
        self.validate()

    @classmethod
    def _unchecked(cls, rules, initial_sources, target):
        """Build without invariant checks (for reporting broken model output)."""
        self = object.__new__(cls)
        object.__setattr__(self, "rules", tuple(rules))
        object.__setattr__(self, "initial_sources", frozenset(initial_sources))
        object.__setattr__(self, "target", target)
        return self

    def __repr__(self):
        """Return a summary of the task graph."""
        return (
            f"<TaskGraph | {len(self.nodes)} nodes, {len(self.rules)} rules> \n"
            f"  Initial sources: {', '.join(sorted_nodes(self.initial_sources))} \n"
            f"  Target: {self.target} \n"
        )

    def validate(self):
        """Check every task-graph invariant.

        Raises
        ------
        InvariantViolationError
            Naming the first violated invariant.
        """
        ids = [rule.id for rule in self.rules]
        if len(set(ids)) != len(ids):
            raise InvariantViolationError("unique-ids", "rule ids are not unique")
        keys = [rule.key for rule in self.rules]
        if len(set(keys)) != len(keys):
            raise InvariantViolationError(
                "duplicate-rule", "two rules share the same source set and target"
            )
        if not self.initial_sources:
            raise InvariantViolationError("initial-sources", "no initial source")
        for node in self.initial_sources:
            _check_node(node, "initial source")
        _check_node(self.target, "target")
        if self.target in self.initial_sources:
            raise InvariantViolationError(
                "target-initial", f"target {self.target} is an initial source"
            )
        if not nx.is_directed_acyclic_graph(self.precedence):
            cycle = nx.find_cycle(self.precedence)
            raise InvariantViolationError(
                "acyclicity", f"rules induce a cycle through {cycle[0][0]}"
            )
        produced = {rule.target for rule in self.rules}
        heads = produced & self.initial_sources
        if heads:
            raise InvariantViolationError(
                "head-initial",
                f"initial source(s) {sorted_nodes(heads)} are produced by a rule",
            )
        if self.target not in self.achievable():
            raise InvariantViolationError(
                "achievability", f"target {self.target} is not achievable"
            )

    def achievable(self, rules=None):
        """Least fixed point of achieved nodes, closing under applicable rules.

        Parameters
        ----------
        rules : iterable of Rule | None
            Restrict the closure to these rules (default: all rules).

        Returns
        -------
        achieved : set of str
        """
        rules = self.rules if rules is None else tuple(rules)
        achieved = set(self.initial_sources)
        changed = True
        while changed:
            changed = False
            for rule in rules:
                if rule.target not in achieved and rule.source <= achieved:
                    achieved.add(rule.target)
                    changed = True
        return achieved

    @cached_property
    def nodes(self):
        """All node labels mentioned by the graph, sorted by number."""
        nodes = set(self.initial_sources) | {self.target}
        for rule in self.rules:
            nodes |= rule.source
            nodes.add(rule.target)
        return tuple(sorted_nodes(nodes))

    @cached_property
    def precedence(self):
        """The node precedence relation as a :class:`networkx.DiGraph`."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for rule in self.rules:
            graph.add_edges_from((s, rule.target) for s in rule.source)
        return graph

    @cached_property
    def node_order(self):
        """Map node label to its position in a deterministic topological order."""
        order = nx.lexicographical_topological_sort(self.precedence, key=node_sort_key)
        return {node: ii for ii, node in enumerate(order)}

    @cached_property
    def rules_by_target(self):
        """Map node label to the tuple of rules producing it (by id)."""
        out = {}
        for rule in sorted(self.rules, key=lambda r: r.id):
            out.setdefault(rule.target, []).append(rule)
        return {key: tuple(val) for key, val in out.items()}

    @cached_property
    def rule_index(self):
        """Map (source set, target) to its rule."""
        return {rule.key: rule for rule in self.rules}

    @cached_property
    def rule_by_id(self):
        """Map rule id to its rule."""
        return {rule.id: rule for rule in self.rules}

    def match(self, source, target):
        """Return the rule with exactly this source set and target, or None."""
        return self.rule_index.get((frozenset(source), target))

    def to_dict(self):
        """Serialise with the wire field order."""
        return {
            "rules": [
                rule.to_dict() for rule in sorted(self.rules, key=lambda r: r.id)
            ],
            "initial_source": sorted_nodes(self.initial_sources),
            "target": self.target,
        }

    def to_json(self, indent=4):
        """Serialise to a JSON string (pretty-printed by default)."""
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, obj, validate=True):
        """Decode a task graph document.

        Parameters
        ----------
        obj : dict
            The decoded JSON object (``rules``, ``initial_source``, ``target``).
            Rule ids default to the rule's position when absent.
        validate : bool
            If False, skip the graph-level invariants (rules themselves are
            always checked).

        Returns
        -------
        graph : TaskGraph
        """
        model = validate_graph_document(obj)
        rules = []
        for ii, rule in enumerate(model.rules):
            source = list(rule.source)
            if len(set(source)) != len(source):
                raise InvariantViolationError(
                    "rule-source", f"rule {ii} lists a source twice"
                )
            try:
                target = _single(rule.target, f"rules.{ii}.target")
            except SchemaMismatchError as exc:
                exc.index = ii
                raise
            rules.append(
                Rule(
                    id=ii if rule.id is None else rule.id,
                    source=frozenset(source),
                    target=target,
                    time=rule.time,
                    cost=rule.cost,
                )
            )
        target = _single(model.target, "target")
        if validate:
            return cls(tuple(rules), frozenset(model.initial_source), target)
        return cls._unchecked(rules, model.initial_source, target)

    @classmethod
    def from_json(cls, text, validate=True):
        """Decode a task graph from a JSON string."""
        return cls.from_dict(json.loads(text), validate=validate)


def read_task_graph(fname):
    """Read a task graph from a JSON file.

    Parameters
    ----------
    fname : path-like
        The JSON file.

    Returns
    -------
    graph : TaskGraph
    """
    with open(fname, encoding="utf-8") as fid:
        return TaskGraph.from_dict(json.load(fid))
