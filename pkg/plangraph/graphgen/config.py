"""Generation configuration and the dataset row specifications."""

from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Structure(str, Enum):
    """Shape of the precedence DAG."""

    RANDOM = "random"
    TREE = "tree"

    def __str__(self):
        return self.value


class EdgeRelation(str, Enum):
    """How the edge count scales with the node count."""

    LINEAR = "linear"
    UNIFORM = "uniform"

    def __str__(self):
        return self.value


_STRUCTURE_ALIASES = {"tree_based": "tree", "tree-based": "tree", "treebased": "tree"}

#: Default bound on the rules producing one node, per structure.
DEFAULT_MAX_GROUPS = {"random": 3, "tree": 2}


class _RowFields(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    node_count: int = Field(ge=3)
    structure: Structure
    edge_relation: EdgeRelation = EdgeRelation.LINEAR
    max_groups_per_node: int = Field(default=2, ge=2)
    time_range: Tuple[int, int] = (1, 50)
    fixed_cost: int = Field(default=1, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_max_groups(cls, data):
        if not isinstance(data, dict) or data.get("max_groups_per_node") is not None:
            return data
        structure = str(data.get("structure", "")).lower()
        structure = _STRUCTURE_ALIASES.get(structure, structure)
        if structure in DEFAULT_MAX_GROUPS:
            data = {**data, "max_groups_per_node": DEFAULT_MAX_GROUPS[structure]}
        return data

    @field_validator("structure", mode="before")
    @classmethod
    def _alias_structure(cls, value):
        if isinstance(value, str):
            value = value.lower()
            return _STRUCTURE_ALIASES.get(value, value)
        return value

    @field_validator("edge_relation", mode="before")
    @classmethod
    def _lower_relation(cls, value):
        return value.lower() if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check(self):
        uniform = self.edge_relation is EdgeRelation.UNIFORM
        if uniform and self.structure is not Structure.RANDOM:
            raise ValueError(
                "the uniform edge relation is only valid for random graphs"
            )
        lo, hi = self.time_range
        if lo < 1 or lo > hi:
            raise ValueError(
                f"time_range must satisfy 1 <= low <= high, got {self.time_range}"
            )
        return self


class GenConfig(_RowFields):
    """Configuration of one task-graph instance.

    Parameters
    ----------
    node_count : int
        Number of nodes (>= 3).
    structure : Structure
        ``"random"`` or ``"tree"``.
    edge_relation : EdgeRelation
        ``"linear"`` or ``"uniform"`` (uniform only for random graphs).
    seed : int
        Unsigned 64-bit seed of the instance's random stream.
    max_groups_per_node : int
        Upper bound on the number of rules producing one node. Defaults to
        ``DEFAULT_MAX_GROUPS`` of the structure (3 for random, 2 for tree).
    time_range : tuple of int
        Inclusive range rule durations are drawn from.
    fixed_cost : int
        Cost assigned to every rule.
    """

    seed: int = Field(default=0, ge=0, lt=2**64)


class DatasetRow(_RowFields):
    """One row of a dataset specification: a configuration and a sample count."""

    samples: int = Field(ge=0)

    def config(self, seed):
        """Return the :class:`GenConfig` of one instance of this row."""
        fields = self.model_dump(exclude={"samples"})
        return GenConfig(seed=seed, **fields)

    def label(self):
        """Short human-readable description, used in error context."""
        return f"{self.node_count}/{self.structure}/{self.edge_relation}"


class DatasetSpec(BaseModel):
    """A list of dataset rows plus the master seed.

    This is the schema of the ``gen --config`` and ``dataset --spec`` files.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=0, ge=0, lt=2**64)
    rows: List[DatasetRow]

    @property
    def total(self):
        """Total number of instances."""
        return sum(row.samples for row in self.rows)


def _rows(table):
    return [
        DatasetRow(node_count=n, structure=s, edge_relation=e, samples=k)
        for n, s, e, k in table
    ]


#: Rows of the training set (6 x 2,000 instances).
TRAIN_SPEC = _rows(
    [
        (10, "random", "uniform", 2000),
        (10, "tree", "linear", 2000),
        (30, "random", "uniform", 2000),
        (30, "tree", "linear", 2000),
        (50, "random", "linear", 2000),
        (50, "tree", "linear", 2000),
    ]
)

#: Rows of the testing set (linear rows of 100, uniform rows of 1,000).
TEST_SPEC = _rows(
    [
        (10, "random", "linear", 100),
        (10, "tree", "linear", 100),
        (10, "random", "uniform", 1000),
        (20, "random", "linear", 100),
        (20, "tree", "linear", 100),
        (30, "random", "linear", 100),
        (30, "tree", "linear", 100),
        (30, "random", "uniform", 1000),
        (40, "random", "linear", 100),
        (40, "tree", "linear", 100),
        (50, "random", "linear", 100),
        (50, "tree", "linear", 100),
    ]
)
