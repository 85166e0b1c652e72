"""Optimal and second-best plan extraction."""

import logging
from dataclasses import dataclass, replace
from math import inf

import networkx as nx

from ..core import Plan, SubPlan, match_rules
from ..errors import UnreachableTargetError
from .eft import earliest_finish_times

logger = logging.getLogger(__name__)

EXACT_THRESHOLD = 24


@dataclass(frozen=True)
class Solution:
    """A plan together with its objective values.

    Unpacks as ``plan, makespan, cost``.

    Parameters
    ----------
    plan : Plan
        The plan, named ``Subtask1``, ``Subtask2``, ... by start time.
    makespan : int
        Its makespan.
    cost : int
        Its total cost.
    rule_ids : tuple of int
        Sorted ids of the rules it applies.
    sum_end : int
        Sum of the sub-plans' end times (the first tie-break).
    exact : bool
        False if the cost was minimised heuristically.
    """

    plan: Plan
    makespan: int
    cost: int
    rule_ids: tuple
    sum_end: int = 0
    exact: bool = True

    def __iter__(self):
        return iter((self.plan, self.makespan, self.cost))

    @property
    def objective(self):
        """The ``(makespan, cost)`` pair."""
        return self.makespan, self.cost

    @property
    def key(self):
        """Total order used to pick among candidate plans."""
        return self.makespan, self.cost, self.sum_end, self.rule_ids

    def to_dict(self):
        """Summary written next to the plan file."""
        return {
            "makespan": self.makespan,
            "cost": self.cost,
            "rule_ids": list(self.rule_ids),
            "exact": self.exact,
        }


def _end_times(graph, producer):
    """Finish time of every produced node when each node has one producer."""
    end = {}
    for node in sorted(producer, key=graph.node_order.get):
        rule = producer[node]
        start = max((end.get(s, 0) for s in rule.source), default=0)
        end[node] = start + rule.time
    return end


def plan_from_rules(graph, rules):
    """Build the plan applying ``rules``, one producer per node.

    Sub-plans are named ``Subtask1``, ``Subtask2``, ... by (start time, rule
    id), and a sub-plan depends on exactly the producers of its sources.

    Parameters
    ----------
    graph : TaskGraph
        The task graph.
    rules : iterable of Rule
        At most one rule per target, closed under producers of non-initial
        sources.

    Returns
    -------
    solution : Solution
    """
    producer = {}
    for rule in rules:
        if rule.target in producer:
            raise ValueError(f"Two rules produce {rule.target}")
        producer[rule.target] = rule
    end = _end_times(graph, producer)
    ordered = sorted(producer.values(), key=lambda r: (end[r.target] - r.time, r.id))
    names = {rule.target: f"Subtask{ii + 1}" for ii, rule in enumerate(ordered)}
    subtasks = []
    for rule in ordered:
        deps = [names[s] for s in rule.source if s not in graph.initial_sources]
        deps.sort(key=lambda name: int(name[len("Subtask"):]))
        name = names[rule.target]
        subtasks.append(SubPlan(name, rule.source, rule.target, tuple(deps)))
    return Solution(
        plan=Plan(tuple(subtasks)),
        makespan=max(end.values(), default=0),
        cost=sum(rule.cost for rule in ordered),
        rule_ids=tuple(sorted(rule.id for rule in ordered)),
        sum_end=sum(end.values()),
    )


class _Extractor:
    """Pick one producer per needed node under latest-finish deadlines.

    Pending nodes are expanded in decreasing topological position, so all the
    consumers of a node are chosen before it and its deadline is final.
    """

    def __init__(self, graph, forbidden=frozenset()):
        self.graph = graph
        allowed = [rule for rule in graph.rules if rule.id not in forbidden]
        self.eft = earliest_finish_times(graph, allowed)
        self.initial = graph.initial_sources
        self.order = graph.node_order
        self.by_target = {}
        for rule in sorted(allowed, key=lambda r: r.id):
            if self.eft.ready_time(rule) is not None:
                self.by_target.setdefault(rule.target, []).append(rule)
        self.min_cost = {
            node: min(rule.cost for rule in rules)
            for node, rules in self.by_target.items()
        }
        self.h_add = self._additive_costs()
        self.best = None

    def _additive_costs(self):
        h = {node: 0 for node in self.initial}
        for node in sorted(self.by_target, key=self.order.get):
            h[node] = min(
                rule.cost + sum(h.get(s, inf) for s in rule.source)
                for rule in self.by_target[node]
            )
        return h

    def relevant_rules(self, target):
        needed = {target} | nx.ancestors(self.graph.precedence, target)
        return [r for node in needed for r in self.by_target.get(node, ())]

    def _admissible(self, node, deadline):
        return [
            rule for rule in self.by_target.get(node, ())
            if self.eft.ready_time(rule) <= deadline
        ]

    def _rank(self, rule, pending, chosen):
        fresh = [
            s for s in rule.source
            if s not in self.initial and s not in pending and s not in chosen
        ]
        estimate = rule.cost + sum(self.h_add[s] for s in fresh)
        return estimate, self.eft.ready_time(rule), rule.id

    def _expand(self, rule, deadline, pending):
        out = dict(pending)
        for s in rule.source:
            if s not in self.initial:
                out[s] = min(out.get(s, inf), deadline - rule.time)
        return out

    def greedy(self, target):
        pending, chosen = {target: self.eft[target]}, {}
        while pending:
            node = max(pending, key=self.order.get)
            deadline = pending.pop(node)
            options = self._admissible(node, deadline)
            rule = min(options, key=lambda r: self._rank(r, pending, chosen))
            chosen[node] = rule
            pending = self._expand(rule, deadline, pending)
        return plan_from_rules(self.graph, chosen.values())

    def branch_and_bound(self, target, incumbent):
        self.best = incumbent
        self._branch({target: self.eft[target]}, {}, 0)
        return self.best

    def _branch(self, pending, chosen, cost):
        best = self.best
        bound = cost + sum(self.min_cost[node] for node in pending)
        if bound > best.cost:
            return
        if bound == best.cost:
            end_bound = sum(self.eft[node] for node in chosen)
            end_bound += sum(self.eft[node] for node in pending)
            if end_bound > best.sum_end:
                return
        if not pending:
            candidate = plan_from_rules(self.graph, chosen.values())
            if candidate.key < best.key:
                self.best = candidate
            return
        node = max(pending, key=self.order.get)
        deadline = pending[node]
        rest = {key: val for key, val in pending.items() if key != node}
        options = sorted(
            self._admissible(node, deadline), key=lambda r: self._rank(r, rest, chosen)
        )
        for rule in options:
            chosen[node] = rule
            self._branch(self._expand(rule, deadline, rest), chosen, cost + rule.cost)
            del chosen[node]


def _solve(graph, forbidden=frozenset(), exact_threshold=EXACT_THRESHOLD):
    """Optimal plan of ``graph`` without the rules whose ids are ``forbidden``."""
    extractor = _Extractor(graph, forbidden)
    target = graph.target
    if not extractor.eft.reachable(target):
        raise UnreachableTargetError(f"Target {target} cannot be achieved")
    incumbent = extractor.greedy(target)
    n_relevant = len(extractor.relevant_rules(target))
    if n_relevant > exact_threshold:
        logger.debug(
            "Greedy cost extraction: %d relevant rules > %d",
            n_relevant,
            exact_threshold,
        )
        return replace(incumbent, exact=False)
    return extractor.branch_and_bound(target, incumbent)


def _improve(graph, incumbent, exact_threshold):
    """Replace a greedy plan by any single-rule-forbidden re-solve that beats it.

    Stops once no re-solve beats the incumbent, so a second-best search over
    the same re-solves never finds a better plan than the one returned.
    """
    improved = True
    while improved:
        improved = False
        for rule_id in incumbent.rule_ids:
            try:
                candidate = _solve(graph, frozenset([rule_id]), exact_threshold)
            except UnreachableTargetError:
                continue
            if candidate.key < incumbent.key:
                logger.debug(
                    "Greedy plan improved from %s to %s",
                    incumbent.objective,
                    candidate.objective,
                )
                incumbent, improved = replace(candidate, exact=False), True
                break
    return incumbent


def optimal_plan(graph, exact_threshold=EXACT_THRESHOLD):
    """Compute the optimal plan of a task graph.

    The makespan is always the earliest finish time of the target. Among plans
    with that makespan the cost is minimised exactly by branch and bound when at
    most ``exact_threshold`` rules can contribute to the target, and greedily
    otherwise. A greedy plan is then replaced by any better plan found by
    re-solving without one of its rules, until none is found. Remaining ties
    are broken by the sum of end times and then by the sorted rule ids.

    Parameters
    ----------
    graph : TaskGraph
        A valid task graph.
    exact_threshold : int
        Largest number of relevant rules solved exactly.

    Returns
    -------
    solution : Solution
        Unpacks as ``plan, makespan, cost``.

    Raises
    ------
    UnreachableTargetError
        If the target cannot be achieved.

    Examples
    --------
    >>> from plangraph.core import Rule, TaskGraph
    >>> graph = TaskGraph([Rule(0, {"N1"}, "N2", 5, 1)], {"N1"}, "N2")
    >>> plan, makespan, cost = optimal_plan(graph)
    >>> makespan, cost, len(plan)
    (5, 1, 1)
    """
    solution = _solve(graph, exact_threshold=exact_threshold)
    if not solution.exact:
        solution = _improve(graph, solution, exact_threshold)
    return solution


def _rule_ids(graph, opt):
    if isinstance(opt, Solution):
        return opt.rule_ids
    matched = match_rules(graph, opt)
    return tuple(sorted(rule.id for rule in matched.values()))


def second_best_plan(graph, opt, exact_threshold=EXACT_THRESHOLD):
    """Compute the best plan that does not use every rule of ``opt``.

    Each rule of ``opt`` is forbidden in turn, the graph is re-solved, and the
    best of the resulting plans is returned. All candidates are minimal: every
    sub-plan feeds the target.

    Parameters
    ----------
    graph : TaskGraph
        The task graph.
    opt : Solution | Plan
        The optimal plan.
    exact_threshold : int
        Passed to the re-solves.

    Returns
    -------
    solution : Solution | None
        None if no alternative plan exists.
    """
    opt_ids = _rule_ids(graph, opt)
    best = None
    for rule_id in opt_ids:
        try:
            candidate = _solve(graph, frozenset([rule_id]), exact_threshold)
        except UnreachableTargetError:
            continue
        if candidate.rule_ids == opt_ids:
            continue
        if best is None or candidate.key < best.key:
            best = candidate
    return best


def solve(graph, second_best=False, exact_threshold=EXACT_THRESHOLD):
    """Solve a task graph.

    Parameters
    ----------
    graph : TaskGraph
        The task graph.
    second_best : bool
        Also compute the second-best plan.
    exact_threshold : int
        See :func:`optimal_plan`.

    Returns
    -------
    optimal : Solution
        The optimal plan.
    second : Solution | None
        The second-best plan, or None if not requested or nonexistent.
    """
    optimal = optimal_plan(graph, exact_threshold)
    second = second_best_plan(graph, optimal, exact_threshold) if second_best else None
    return optimal, second
