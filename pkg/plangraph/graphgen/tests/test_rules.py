import networkx as nx
import numpy as np
import pytest
from pydantic import ValidationError

from plangraph.graphgen import (
    TEST_SPEC,
    TRAIN_SPEC,
    DatasetRow,
    DatasetSpec,
    GenConfig,
    batch_jobs,
    build_task_graph,
    derive_seed,
    edge_count_range,
    generate_batch,
    group_size_cap,
    partition_predecessors,
    tree_depth,
)

CONFORMANCE_SAMPLES = 1000


def _cfg(**kwargs):
    kwargs.setdefault("structure", "random")
    return GenConfig(**kwargs)


def test_config_validation():
    """Test the generation configuration checks."""
    cfg = _cfg(node_count=10, structure="tree_based")
    assert str(cfg.structure) == "tree"
    assert cfg.time_range == (1, 50)
    assert cfg.fixed_cost == 1
    assert cfg.max_groups_per_node == 2
    assert _cfg(node_count=10).max_groups_per_node == 3
    assert _cfg(node_count=10, max_groups_per_node=4).max_groups_per_node == 4
    row = DatasetRow(node_count=10, structure="tree-based", samples=1)
    assert row.config(0).max_groups_per_node == 2
    with pytest.raises(ValidationError, match="uniform"):
        _cfg(node_count=10, structure="tree", edge_relation="uniform")
    with pytest.raises(ValidationError):
        _cfg(node_count=2)
    with pytest.raises(ValidationError):
        _cfg(node_count=10, time_range=(5, 2))
    with pytest.raises(ValidationError):
        _cfg(node_count=10, max_groups_per_node=1)
    with pytest.raises(ValidationError):
        _cfg(node_count=10, colour="red")


def test_table_specs():
    """Test the training and testing row specifications."""
    assert len(TRAIN_SPEC) == 6
    assert DatasetSpec(rows=TRAIN_SPEC).total == 12_000
    samples = {(r.node_count, str(r.structure), str(r.edge_relation)): r.samples
               for r in TEST_SPEC}
    assert samples[(10, "random", "uniform")] == 1000
    assert samples[(30, "random", "uniform")] == 1000
    assert samples[(50, "tree", "linear")] == 100
    assert all(r.samples == 100 for r in TEST_SPEC if str(r.edge_relation) == "linear")
    row = DatasetRow(node_count=10, structure="random", samples=5)
    assert row.config(3).seed == 3
    assert row.label() == "10/random/linear"


def test_partition_predecessors():
    """Test predecessor groups respect the two-thirds cap."""
    assert group_size_cap(5) == 3
    cfg = _cfg(node_count=10)
    rng = np.random.default_rng(0)
    assert partition_predecessors(["N1"], cfg, rng) == [frozenset({"N1"})]
    assert sorted(map(len, partition_predecessors(["N1", "N2"], cfg, rng))) == [1, 1]
    preds = [f"N{ii}" for ii in range(1, 10)]
    for k in range(2, 10):
        for _ in range(50):
            groups = partition_predecessors(preds[:k], cfg, rng)
            sizes = [len(group) for group in groups]
            assert 2 <= len(groups) <= min(k, cfg.max_groups_per_node)
            assert max(sizes) - min(sizes) <= 1
            assert max(sizes) <= group_size_cap(k)
            assert frozenset().union(*groups) == frozenset(preds[:k])
            assert sum(sizes) == k
    with pytest.raises(ValueError):
        partition_predecessors([], cfg, rng)


def test_build_task_graph():
    """Test a generated task graph follows its configuration."""
    cfg = _cfg(node_count=10, seed=42)
    graph = build_task_graph(cfg)
    assert build_task_graph(cfg) == graph
    assert build_task_graph(cfg.model_copy(update={"seed": 43})) != graph
    assert len(graph.nodes) == 10
    lo, hi = edge_count_range(cfg)
    assert lo <= graph.precedence.number_of_edges() <= hi
    heads = {n for n, deg in graph.precedence.in_degree() if deg == 0}
    tails = {n for n, deg in graph.precedence.out_degree() if deg == 0}
    assert graph.initial_sources == heads
    assert graph.target in tails - heads
    assert graph.target in graph.achievable()
    assert sorted(rule.id for rule in graph.rules) == list(range(len(graph.rules)))


def _check_conformance(graph, cfg):
    lo, hi = edge_count_range(cfg)
    precedence = graph.precedence
    assert lo <= precedence.number_of_edges() <= hi
    assert nx.is_directed_acyclic_graph(precedence)
    assert nx.is_weakly_connected(precedence)
    assert len(graph.nodes) == cfg.node_count
    assert graph.target in graph.achievable()
    assert all(1 <= rule.time <= 50 and rule.cost == 1 for rule in graph.rules)
    if str(cfg.structure) == "tree":
        assert tree_depth(graph) <= 4
    for node, rules in graph.rules_by_target.items():
        k = precedence.in_degree(node)
        if k >= 2:
            assert all(len(rule.source) <= group_size_cap(k) for rule in rules)


@pytest.mark.timeout(600)
@pytest.mark.parametrize("row", TEST_SPEC, ids=lambda row: row.label())
def test_generator_conformance(row):
    """Test every generated instance of a testing row is well formed."""
    for ii in range(CONFORMANCE_SAMPLES):
        cfg = row.config(derive_seed(row.node_count, ii))
        _check_conformance(build_task_graph(cfg), cfg)


def test_generate_batch():
    """Test batches are seeded per instance."""
    rows = [
        DatasetRow(node_count=6, structure="random", samples=3),
        DatasetRow(node_count=6, structure="tree", samples=0),
        DatasetRow(node_count=5, structure="tree", samples=2),
    ]
    batch = generate_batch(rows, master_seed=11)
    assert [item["index"] for item in batch] == [0, 1, 2, 3, 4]
    assert [item["seed"] for item in batch] == [derive_seed(11, ii) for ii in range(5)]
    assert batch[3]["meta"]["structure"] == "tree"
    assert batch[0]["meta"]["node_count"] == 6
    for item in batch:
        assert item["meta"]["edge_count"] == item["graph"].precedence.number_of_edges()
    # an instance only depends on its configuration and index
    alone = build_task_graph(rows[0].config(derive_seed(11, 1)))
    assert alone == batch[1]["graph"]
    alone = build_task_graph(rows[2].config(derive_seed(11, 4)))
    assert alone == batch[4]["graph"]
    jobs = batch_jobs(rows, 11)
    labels = [label for _, _, label in jobs]
    assert labels == ["6/random/linear"] * 3 + ["5/tree/linear"] * 2
    parallel = generate_batch(rows, master_seed=11, n_jobs=2)
    assert parallel[4]["graph"] == batch[4]["graph"]
