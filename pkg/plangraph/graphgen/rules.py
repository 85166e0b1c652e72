"""Turn a precedence DAG into a task graph: rules, times, costs and the query."""

import logging
from math import ceil

import numpy as np

from ..core import Rule, TaskGraph
from ..errors import DegenerateGraphError, InfeasibleEdgeCountError
from ..utils.utils import _parallel_map
from .config import Structure
from .dag import derive_seed, gen_random_dag, gen_tree_based_dag, sample_edge_count

logger = logging.getLogger(__name__)


def group_size_cap(k):
    """Largest allowed group when splitting ``k`` predecessors.

    Two thirds of ``k`` rounded down, and at least 1.

    Examples
    --------
    >>> group_size_cap(5), group_size_cap(2), group_size_cap(1)
    (3, 1, 1)
    """
    return max(1, (2 * k) // 3)


def partition_predecessors(preds, cfg, rng):
    """Split the predecessors of a node into rule source groups.

    The predecessors are shuffled and split into ``g`` groups whose sizes
    differ by at most one, where ``g`` is drawn uniformly among the counts that
    respect both :func:`group_size_cap` and ``cfg.max_groups_per_node``.

    Parameters
    ----------
    preds : iterable of str
        The predecessors (non-empty).
    cfg : GenConfig
        Provides ``max_groups_per_node``.
    rng : numpy.random.Generator
        The random stream.

    Returns
    -------
    groups : list of frozenset
        Disjoint non-empty groups covering ``preds``.
    """
    preds = sorted(preds)
    if not preds:
        raise ValueError("Cannot partition an empty predecessor set")
    k = len(preds)
    if k == 1:
        return [frozenset(preds)]
    g_min = max(2, ceil(k / group_size_cap(k)))
    g_max = max(g_min, min(k, cfg.max_groups_per_node))
    n_groups = int(rng.integers(g_min, g_max, endpoint=True))
    shuffled = [preds[ii] for ii in rng.permutation(k)]
    return [frozenset(chunk.tolist()) for chunk in np.array_split(shuffled, n_groups)]


def _sample_dag(cfg, rng):
    m = sample_edge_count(cfg, rng)
    n = cfg.node_count
    if cfg.structure is Structure.TREE:
        return gen_tree_based_dag(n, m - (n - 1), rng)
    return gen_random_dag(n, m, rng)


def build_task_graph(cfg, rng=None, max_tries=50):
    """Generate one task graph.

    Every non-head node gets one rule per predecessor group, durations are
    drawn from ``cfg.time_range``, every cost is ``cfg.fixed_cost``, the head
    vertices become the initial sources and the target is drawn among the tail
    vertices.

    Parameters
    ----------
    cfg : GenConfig
        The configuration.
    rng : numpy.random.Generator | None
        The random stream. Defaults to a stream seeded with ``cfg.seed``.
    max_tries : int
        Number of DAGs drawn before giving up.

    Returns
    -------
    graph : TaskGraph

    Raises
    ------
    DegenerateGraphError
        If no usable DAG was drawn within ``max_tries``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.time_range
    for attempt in range(max_tries):
        try:
            dag = _sample_dag(cfg, rng)
        except InfeasibleEdgeCountError as exc:
            logger.debug("Attempt %d: %s", attempt, exc)
            continue
        heads = dag.heads
        candidates = [node for node in dag.tails if node not in set(heads)]
        if not candidates:
            logger.debug("Attempt %d: every tail vertex is a head vertex", attempt)
            continue
        drafts = []
        for node in dag.nodes:
            preds = dag.predecessors(node)
            if not preds:
                continue
            for group in partition_predecessors(preds, cfg, rng):
                drafts.append((group, node, int(rng.integers(lo, hi, endpoint=True))))
        order = rng.permutation(len(drafts))
        rules = tuple(
            Rule(
                id=ii,
                source=drafts[jj][0],
                target=drafts[jj][1],
                time=drafts[jj][2],
                cost=cfg.fixed_cost,
            )
            for ii, jj in enumerate(order)
        )
        target = candidates[int(rng.integers(len(candidates)))]
        return TaskGraph(rules, frozenset(heads), target)
    raise DegenerateGraphError(
        f"No usable task graph for {cfg.node_count} nodes "
        f"({cfg.structure}, {cfg.edge_relation}) after {max_tries} tries"
    )


def _build_one(job):
    cfg, index, label = job
    try:
        return index, cfg.seed, build_task_graph(cfg)
    except DegenerateGraphError as exc:
        raise DegenerateGraphError(f"row {label}, instance {index}: {exc}") from exc


def batch_jobs(rows, master_seed):
    """List the ``(config, index, row label)`` jobs of a batch.

    Instance ``i`` (counted across all rows) gets the seed
    ``derive_seed(master_seed, i)``.
    """
    jobs = []
    for row in rows:
        for _ in range(row.samples):
            index = len(jobs)
            cfg = row.config(derive_seed(master_seed, index))
            jobs.append((cfg, index, row.label()))
    return jobs


def generate_batch(rows, master_seed, n_jobs=1, progress=False):
    """Generate the task graphs of several dataset rows.

    The output does not depend on ``n_jobs`` or scheduling, see
    :func:`batch_jobs` for the seeding.

    Parameters
    ----------
    rows : list of DatasetRow
        The rows.
    master_seed : int
        Master seed of the batch.
    n_jobs : int | None
        Number of worker processes (None: all cores).
    progress : bool
        Show a progress bar on standard error.

    Returns
    -------
    batch : list of dict
        One entry per instance with keys ``graph`` (TaskGraph), ``seed``,
        ``index`` and ``meta`` (node count, structure, edge relation, edge
        count and seed).
    """
    jobs = batch_jobs(rows, master_seed)
    built = _parallel_map(
        _build_one, jobs, n_jobs=n_jobs, desc="Generating" if progress else None
    )
    out = []
    for (cfg, _, _), (index, seed, graph) in zip(jobs, built):
        out.append(
            {
                "index": index,
                "seed": seed,
                "graph": graph,
                "meta": instance_meta(cfg, graph),
            }
        )
    return out


def instance_meta(cfg, graph):
    """Metadata describing how an instance was generated."""
    return {
        "node_count": cfg.node_count,
        "structure": str(cfg.structure),
        "edge_relation": str(cfg.edge_relation),
        "edge_count": graph.precedence.number_of_edges(),
        "seed": cfg.seed,
    }
