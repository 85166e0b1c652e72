"""Comparison of an extracted task graph with the gold graph."""

from collections import Counter

from ..core import sorted_nodes

DEFAULT_WEIGHTS = (0.8, 0.1, 0.1)


def _rule_multiset(graph):
    return Counter(
        (tuple(sorted_nodes(rule.source)), rule.target, rule.time, rule.cost)
        for rule in graph.rules
    )


def graph_similarity(extracted, gold, weights=DEFAULT_WEIGHTS):
    """Compare two task graphs, ignoring rule ids and order.

    Parameters
    ----------
    extracted : TaskGraph
        The graph read back from a model.
    gold : TaskGraph
        The reference graph.
    weights : tuple of float
        Weights of the rule Jaccard index, the initial-source match and the
        target match.

    Returns
    -------
    exact_match : bool
        Rules, initial sources and target all equal.
    similarity : float
        Weighted score in ``[0, 1]``.
    """
    ours, theirs = _rule_multiset(extracted), _rule_multiset(gold)
    union = sum((ours | theirs).values())
    jaccard = sum((ours & theirs).values()) / union if union else 1.0
    initial = extracted.initial_sources == gold.initial_sources
    target = extracted.target == gold.target
    w_rules, w_initial, w_target = weights
    similarity = w_rules * jaccard + w_initial * initial + w_target * target
    return ours == theirs and initial and target, similarity


def _describe(key):
    source, target, time, cost = key
    return f"{' + '.join(source)} -> {target} (time {time}, cost {cost})"


def _node_list(nodes):
    return ", ".join(sorted_nodes(nodes))


def mismatch_report(extracted, gold):
    """Describe how ``extracted`` differs from ``gold``, one line per issue."""
    ours, theirs = _rule_multiset(extracted), _rule_multiset(gold)
    missing = sorted((theirs - ours).elements())
    extra = sorted((ours - theirs).elements())
    lines = [f"- missing rule: {_describe(key)}" for key in missing]
    lines += [f"- extra rule: {_describe(key)}" for key in extra]
    if extracted.initial_sources != gold.initial_sources:
        lines.append(
            f"- initial sources are {_node_list(extracted.initial_sources)}, "
            f"expected {_node_list(gold.initial_sources)}"
        )
    if extracted.target != gold.target:
        lines.append(f"- target is {extracted.target}, expected {gold.target}")
    return "\n".join(lines)
