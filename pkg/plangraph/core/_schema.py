"""Strict wire schemas for task graphs and plans."""

from typing import Annotated, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StringConstraints, ValidationError

from ..errors import SchemaMismatchError

NODE_PATTERN = r"^N[1-9][0-9]*$"

NodeLabel = Annotated[str, StringConstraints(pattern=NODE_PATTERN)]


class _Strict(BaseModel):
    model_config = ConfigDict(strict=True, extra="ignore", frozen=True)


class RuleModel(_Strict):
    id: Optional[int] = Field(default=None, ge=0)
    source: List[str] = Field(min_length=1)
    target: Union[str, List[str]]
    time: int
    cost: int


class TaskGraphModel(_Strict):
    rules: List[RuleModel]
    initial_source: List[str]
    target: Union[str, List[str]]


class SubPlanModel(_Strict):
    name: str
    source: List[NodeLabel] = Field(min_length=1)
    target: Union[NodeLabel, List[NodeLabel]]
    dependencies: List[str]


def _single(value, where):
    """Unwrap a target given either as a string or a one-element list."""
    if isinstance(value, list):
        if len(value) != 1:
            raise SchemaMismatchError(
                f"{where} must hold exactly one node, got {len(value)}",
                field=where,
            )
        return value[0]
    return value


def _from_validation_error(exc, index=None):
    """Convert the first pydantic error into a SchemaMismatchError."""
    first = exc.errors()[0]
    loc = [str(part) for part in first["loc"]]
    if index is None and len(first["loc"]) >= 2 and isinstance(first["loc"][1], int):
        index = first["loc"][1]
    field = ".".join(loc) or None
    where = f"element {index}" if index is not None else "document"
    return SchemaMismatchError(
        f"{where}: field '{field}': {first['msg']}", index=index, field=field
    )


def validate_graph_document(obj):
    """Validate a decoded task graph document, raising SchemaMismatchError."""
    if not isinstance(obj, dict):
        raise SchemaMismatchError(
            f"Expected a JSON object for the task graph, got {type(obj).__name__}"
        )
    try:
        return TaskGraphModel.model_validate(obj)
    except ValidationError as exc:
        raise _from_validation_error(exc) from None


def validate_plan_document(obj):
    """Validate a decoded plan document, raising SchemaMismatchError."""
    if not isinstance(obj, list):
        raise SchemaMismatchError(
            f"Expected a JSON array of subtasks, got {type(obj).__name__}"
        )
    models = []
    for ii, element in enumerate(obj):
        if not isinstance(element, dict):
            raise SchemaMismatchError(
                f"element {ii}: expected an object, got {type(element).__name__}",
                index=ii,
            )
        try:
            models.append(SubPlanModel.model_validate(element))
        except ValidationError as exc:
            raise _from_validation_error(exc, index=ii) from None
    return models
