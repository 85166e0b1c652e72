"""Exhaustive reference solver."""

import networkx as nx
import numpy as np

from ..errors import TooLargeError, UnreachableTargetError
from .optimal import plan_from_rules

MAX_RULES = 20
_CHUNK = 1 << 16


def brute_force_solve(graph, max_rules=MAX_RULES):
    """Find the optimal plan by enumerating rule subsets.

    Only the rules producing the target or one of its ancestors are
    enumerated, and subsets holding two producers of the same node are
    skipped; both only add cost. Every remaining subset whose rules are all
    applicable and which produces the target is scheduled, and the best one
    under (makespan, cost, sum of end times, sorted rule ids) is returned.

    Parameters
    ----------
    graph : TaskGraph
        The task graph.
    max_rules : int
        Size guard on the number of enumerated rules.

    Returns
    -------
    solution : Solution

    Raises
    ------
    TooLargeError
        If more than ``max_rules`` rules would be enumerated.
    UnreachableTargetError
        If no subset reaches the target.
    """
    needed = nx.ancestors(graph.precedence, graph.target) | {graph.target}
    order = graph.node_order
    rules = sorted(
        (rule for rule in graph.rules if rule.target in needed),
        key=lambda r: (order[r.target], r.id),
    )
    k = len(rules)
    if k > max_rules:
        raise TooLargeError(f"{k} relevant rules exceed the guard of {max_rules}")
    nodes = sorted(needed | set(graph.initial_sources), key=order.get)
    column = {node: ii for ii, node in enumerate(nodes)}
    times = np.array([rule.time for rule in rules], dtype=np.int64)
    costs = np.array([rule.cost for rule in rules], dtype=np.int64)
    bit = np.int64(1) << np.arange(k, dtype=np.int64)
    producers = {}
    for jj, rule in enumerate(rules):
        producers.setdefault(rule.target, []).append(jj)

    best_key, best_mask = None, None
    for first in range(0, 1 << k, _CHUNK):
        masks = np.arange(first, min(first + _CHUNK, 1 << k), dtype=np.int64)
        used = (masks[:, None] & bit) != 0
        ok = np.ones(len(masks), bool)
        for cols in producers.values():
            ok &= used[:, cols].sum(axis=1) <= 1
        finish = np.full((len(masks), len(nodes)), np.inf)
        for node in graph.initial_sources:
            if node in column:
                finish[:, column[node]] = 0
        ends = np.full((len(masks), k), np.inf)
        for jj, rule in enumerate(rules):
            start = finish[:, [column[s] for s in rule.source]].max(axis=1)
            ends[:, jj] = start + times[jj]
            col = column[rule.target]
            finish[:, col] = np.where(
                used[:, jj], np.minimum(finish[:, col], ends[:, jj]), finish[:, col]
            )
        # a chosen rule with an unreachable source is an invalid sub-plan
        ok &= ~(used & np.isinf(ends)).any(axis=1)
        ok &= np.isfinite(finish[:, column[graph.target]])
        if not ok.any():
            continue
        used, ends, masks = used[ok], ends[ok], masks[ok]
        span = np.where(used, ends, 0).max(axis=1)
        cost = (used * costs).sum(axis=1)
        sum_end = np.where(used, ends, 0).sum(axis=1)
        top = np.lexsort((sum_end, cost, span))
        head = (span[top[0]], cost[top[0]], sum_end[top[0]])
        for idx in top:
            if (span[idx], cost[idx], sum_end[idx]) != head:
                break
            ids = tuple(sorted(rules[jj].id for jj in np.flatnonzero(used[idx])))
            key = (int(head[0]), int(head[1]), int(head[2]), ids)
            if best_key is None or key < best_key:
                best_key, best_mask = key, used[idx].copy()
    if best_mask is None:
        raise UnreachableTargetError(f"Target {graph.target} cannot be achieved")
    return plan_from_rules(graph, [rules[jj] for jj in np.flatnonzero(best_mask)])
