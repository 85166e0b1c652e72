"""Connected precedence DAG generators (random and tree-based)."""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Optional

import networkx as nx
import numpy as np

from ..core import node_sort_key, sorted_nodes
from ..errors import InfeasibleEdgeCountError
from .config import EdgeRelation, Structure

MAX_TREE_DEPTH = 4


@dataclass(frozen=True)
class PrecedenceDag:
    """A precedence DAG over node labels.

    Parameters
    ----------
    nodes : tuple of str
        Node labels.
    edges : tuple of (str, str)
        ``(predecessor, successor)`` pairs.
    depth : dict | None
        Depth of every node in the underlying tree (tree-based DAGs only).
    """

    nodes: tuple
    edges: tuple
    depth: Optional[dict] = None

    @cached_property
    def graph(self):
        """The DAG as a :class:`networkx.DiGraph`."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.edges)
        return graph

    @property
    def heads(self):
        """Nodes without predecessors, sorted."""
        return sorted_nodes(n for n, deg in self.graph.in_degree() if deg == 0)

    @property
    def tails(self):
        """Nodes without successors, sorted."""
        return sorted_nodes(n for n, deg in self.graph.out_degree() if deg == 0)

    def predecessors(self, node):
        """Sorted predecessors of ``node``."""
        return sorted_nodes(self.graph.predecessors(node))


def check_precedence_dag(dag):
    """Return the list of structural problems of a precedence DAG (empty if fine)."""
    problems = []
    graph = dag.graph
    if len(set(dag.edges)) != len(dag.edges):
        problems.append("duplicate edges")
    if any(u == v for u, v in dag.edges):
        problems.append("self-loop")
    if not nx.is_directed_acyclic_graph(graph):
        problems.append("cycle")
    if len(dag.nodes) and not nx.is_weakly_connected(graph):
        problems.append("not weakly connected")
    return problems


def tree_depth(graph):
    """Depth of a tree-based precedence relation (longest path to the root).

    Parameters
    ----------
    graph : PrecedenceDag | TaskGraph | networkx.DiGraph
        Anything exposing its precedence DAG.
    """
    if isinstance(graph, PrecedenceDag):
        graph = graph.graph
    elif not isinstance(graph, nx.DiGraph):
        graph = graph.precedence
    return nx.dag_longest_path_length(graph)


def _labels(n, rng):
    """Node labels N1..Nn in a uniformly random order."""
    return [f"N{ii + 1}" for ii in rng.permutation(n)]


def _max_edges(n):
    return n * (n - 1) // 2


def gen_random_dag(n, m, rng):
    """Generate a weakly connected random DAG with exactly ``n`` nodes and ``m`` edges.

    A uniformly random topological order is drawn and every node but the last
    gets one successor drawn uniformly among the nodes after it. This spanning
    tree drains into the last node of the order, which is therefore the only
    tail vertex. The remaining edges are drawn uniformly among the
    order-respecting non-edges.

    Parameters
    ----------
    n : int
        Number of nodes (>= 2).
    m : int
        Number of edges, ``n - 1 <= m <= n * (n - 1) / 2``.
    rng : numpy.random.Generator
        The random stream.

    Returns
    -------
    dag : PrecedenceDag
    """
    if n < 2 or not n - 1 <= m <= _max_edges(n):
        raise InfeasibleEdgeCountError(
            f"Cannot build a connected DAG with {n} nodes and {m} edges "
            f"(need {n - 1} <= m <= {_max_edges(n)})"
        )
    order = _labels(n, rng)  # order[i] is the i-th node of the topological order
    tree_edges = {(ii, int(rng.integers(ii + 1, n))) for ii in range(n - 1)}
    others = [pair for pair in combinations(range(n), 2) if pair not in tree_edges]
    extra = rng.choice(len(others), size=m - len(tree_edges), replace=False)
    positions = sorted(tree_edges) + [others[ii] for ii in sorted(extra)]
    edges = sorted(
        ((order[i], order[j]) for i, j in positions),
        key=lambda e: (node_sort_key(e[0]), node_sort_key(e[1])),
    )
    return PrecedenceDag(nodes=tuple(sorted_nodes(order)), edges=tuple(edges))


def _random_tree(n, rng, max_depth):
    """Random recursive tree with bounded depth; returns (parent, depth) by position."""
    parent, depth = {}, {0: 0}
    for ii in range(1, n):
        eligible = [jj for jj in range(ii) if depth[jj] < max_depth]
        pp = eligible[int(rng.integers(len(eligible)))]
        parent[ii], depth[ii] = pp, depth[pp] + 1
    return parent, depth


def _extra_edge_candidates(parent, depth):
    """Ancestral and cross edges that keep every edge pointing to a shallower node."""
    ancestors = {}
    for node in sorted(depth, key=depth.get):
        if node == 0:
            ancestors[node] = set()
        else:
            ancestors[node] = ancestors[parent[node]] | {parent[node]}
    candidates = []
    for u in sorted(depth):
        for v in sorted(depth):
            if depth[v] >= depth[u] or v == parent.get(u):
                continue
            # v is either a non-parent ancestor or sits in another branch
            candidates.append((u, v))
    return candidates


def gen_tree_based_dag(n, extra_edges, rng, max_depth=MAX_TREE_DEPTH, max_tries=100):
    """Generate a tree-based DAG with all edges directed towards the root.

    A random tree of depth at most ``max_depth`` is drawn (edges child ->
    parent), then ``extra_edges`` ancestral or cross edges are added. Every
    added edge ends at a strictly shallower node, so the result stays acyclic
    and the root stays the only tail vertex.

    Parameters
    ----------
    n : int
        Number of nodes (>= 3).
    extra_edges : int
        Number of edges added on top of the ``n - 1`` tree edges.
    rng : numpy.random.Generator
        The random stream.
    max_depth : int
        Depth bound of the underlying tree.
    max_tries : int
        Number of trees drawn before giving up on ``extra_edges``.

    Returns
    -------
    dag : PrecedenceDag
        With ``depth`` populated.
    """
    if n < 3 or extra_edges < 0 or n - 1 + extra_edges > _max_edges(n):
        raise InfeasibleEdgeCountError(
            f"Cannot build a tree-based DAG with {n} nodes "
            f"and {extra_edges} extra edges"
        )
    for _ in range(max_tries):
        labels = _labels(n, rng)
        parent, depth = _random_tree(n, rng, max_depth)
        candidates = _extra_edge_candidates(parent, depth)
        if len(candidates) < extra_edges:
            continue
        chosen = rng.choice(len(candidates), size=extra_edges, replace=False)
        positions = [(child, pp) for child, pp in parent.items()]
        positions += [candidates[ii] for ii in sorted(chosen)]
        edges = sorted(
            ((labels[u], labels[v]) for u, v in positions),
            key=lambda e: (node_sort_key(e[0]), node_sort_key(e[1])),
        )
        return PrecedenceDag(
            nodes=tuple(sorted_nodes(labels)),
            edges=tuple(edges),
            depth={labels[ii]: d for ii, d in depth.items()},
        )
    raise InfeasibleEdgeCountError(
        f"No tree of {n} nodes with depth <= {max_depth} admitted {extra_edges} "
        f"extra edges after {max_tries} tries"
    )


def edge_count_range(cfg):
    """Inclusive (low, high) edge-count range of a configuration.

    Linear ranges are clamped into the connected-DAG range ``[n - 1, n(n - 1)/2]``.
    """
    n = cfg.node_count
    if cfg.edge_relation is EdgeRelation.UNIFORM:
        return n - 1, _max_edges(n)
    if cfg.structure is Structure.TREE:
        lo, hi = n, (3 * n) // 2
    else:
        lo, hi = 2 * n, 3 * n
    cap = _max_edges(n)
    return min(max(lo, n - 1), cap), min(hi, cap)


def sample_edge_count(cfg, rng):
    """Draw an edge count uniformly from the configuration's range.

    Parameters
    ----------
    cfg : GenConfig
        The generation configuration.
    rng : numpy.random.Generator
        The random stream.

    Returns
    -------
    m : int
    """
    lo, hi = edge_count_range(cfg)
    return int(rng.integers(lo, hi, endpoint=True))


def derive_seed(master_seed, index):
    """Derive the 64-bit seed of instance ``index`` from a master seed.

    The derivation depends only on ``(master_seed, index)``, so batches can be
    generated in any order or in parallel.
    """
    seq = np.random.SeedSequence([int(master_seed), int(index)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def derive_rng(master_seed, index):
    """Random stream of instance ``index`` (see :func:`derive_seed`)."""
    return np.random.default_rng(derive_seed(master_seed, index))
