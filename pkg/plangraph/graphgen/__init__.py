from .config import (
    DEFAULT_MAX_GROUPS,
    TEST_SPEC,
    TRAIN_SPEC,
    DatasetRow,
    DatasetSpec,
    EdgeRelation,
    GenConfig,
    Structure,
)
from .dag import (
    PrecedenceDag,
    check_precedence_dag,
    derive_rng,
    derive_seed,
    edge_count_range,
    gen_random_dag,
    gen_tree_based_dag,
    sample_edge_count,
    tree_depth,
)
from .rules import (
    batch_jobs,
    build_task_graph,
    generate_batch,
    group_size_cap,
    instance_meta,
    partition_predecessors,
)
