"""Earliest finish times of every node."""


class EftTable(dict):
    """Earliest finish time of every node of a task graph.

    A dictionary mapping node label to its earliest finish time, with ``None``
    for nodes that cannot be achieved.

    Parameters
    ----------
    eft : dict
        Maps node label to an integer or ``None``.
    producers : dict
        Maps node label to the rules reaching its earliest finish time.
    """

    def __init__(self, eft=(), producers=None):
        super().__init__(eft)
        self.producers = dict(producers or {})

    def __repr__(self):
        """Return a summary of the table."""
        reachable = sum(value is not None for value in self.values())
        return f"<EftTable | {reachable}/{len(self)} nodes reachable>"

    def reachable(self, node):
        """Return True if ``node`` can be achieved."""
        return self.get(node) is not None

    def ready_time(self, rule):
        """Earliest time ``rule`` can finish, or None if a source is unreachable."""
        starts = [self.get(node) for node in rule.source]
        if any(start is None for start in starts):
            return None
        return max(starts) + rule.time

    def critical_nodes(self, target):
        """Nodes on at least one earliest-finish chain ending at ``target``.

        Starting at ``target``, follow every rule that reaches the earliest
        finish time and, for each such rule, every source that finishes last.
        """
        if not self.reachable(target):
            return set()
        out, stack = set(), [target]
        while stack:
            node = stack.pop()
            if node in out:
                continue
            out.add(node)
            for rule in self.producers.get(node, ()):
                latest = max(self[s] for s in rule.source)
                stack.extend(s for s in rule.source if self[s] == latest)
        return out


def earliest_finish_times(graph, rules=None):
    """Compute the earliest finish time of every node.

    Initial sources finish at 0. Any other node finishes at the smallest, over
    its rules with achievable sources, of the latest source finish time plus
    the rule's duration. Nodes are visited in topological order.

    Parameters
    ----------
    graph : TaskGraph
        A valid task graph.
    rules : iterable of Rule | None
        Restrict to these rules (default: all rules of ``graph``).

    Returns
    -------
    eft : EftTable
    """
    if rules is None:
        by_target = graph.rules_by_target
    else:
        by_target = {}
        for rule in sorted(rules, key=lambda r: r.id):
            by_target.setdefault(rule.target, []).append(rule)
    table = EftTable({node: None for node in graph.nodes})
    for node in sorted(graph.nodes, key=graph.node_order.get):
        if node in graph.initial_sources:
            table[node] = 0
            continue
        best, tight = None, []
        for rule in by_target.get(node, ()):
            ready = table.ready_time(rule)
            if ready is None:
                continue
            if best is None or ready < best:
                best, tight = ready, [rule]
            elif ready == best:
                tight.append(rule)
        table[node] = best
        if tight:
            table.producers[node] = tuple(tight)
    return table
