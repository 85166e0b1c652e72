"""Locate and decode JSON in model responses."""

import json
import re
import warnings

from ..core import Plan, TaskGraph
from ..errors import NoJsonFoundError

_DECODER = json.JSONDecoder()
_SINGLE_QUOTED_KEY = re.compile(r"'([^'\\\n]*)'(\s*:)")
_TRAILING_COMMA = re.compile(r",(\s*[\]}])")


def _top_level_values(text):
    """Yield every JSON array or object not nested in another one, left to right."""
    ii = 0
    while ii < len(text):
        if text[ii] in "[{":
            try:
                value, end = _DECODER.raw_decode(text, ii)
            except json.JSONDecodeError:
                ii += 1
                continue
            yield value
            ii = end
        else:
            ii += 1


def _repair(text):
    """Fix single-quoted keys and trailing commas."""
    text = _SINGLE_QUOTED_KEY.sub(r'"\1"\2', text)
    return _TRAILING_COMMA.sub(r"\1", text)


def _last(values, accept):
    found = [value for value in values if accept(value)]
    return found[-1] if found else None


def _is_plan_array(value):
    return isinstance(value, list) and all(isinstance(item, dict) for item in value)


def _is_graph_object(value):
    return isinstance(value, dict) and "rules" in value


def extract_json(text, kind):
    """Return the last well-formed top-level JSON value of a kind in ``text``.

    Arrays of objects are preferred over other arrays and objects holding
    ``"rules"`` over other objects. When nothing suitable decodes, single
    quoted keys and trailing commas are repaired once, with a warning.

    Parameters
    ----------
    text : str
        The model response.
    kind : type
        ``list`` or ``dict``.

    Returns
    -------
    value : list | dict

    Raises
    ------
    NoJsonFoundError
        If no value of the requested kind is found.

    Examples
    --------
    >>> extract_json('Plan: [1] and then [{"name": "a"}] done', list)
    [{'name': 'a'}]
    """
    preferred = _is_plan_array if kind is list else _is_graph_object
    values = list(_top_level_values(text))
    value = _last(values, preferred)
    if value is not None:
        return value
    repaired = _repair(text)
    if repaired != text:
        value = _last(_top_level_values(repaired), preferred)
        if value is not None:
            warnings.warn(
                "The response JSON was repaired (single quotes or trailing commas)",
                RuntimeWarning,
                stacklevel=2,
            )
            return value
    value = _last(values, lambda v: isinstance(v, kind))
    if value is None:
        what = "array" if kind is list else "object"
        raise NoJsonFoundError(f"No JSON {what} found in the response")
    return value


def parse_plan(text):
    """Decode the plan in a model response.

    Parameters
    ----------
    text : str
        The response; the plan may sit inside code fences or after prose.

    Returns
    -------
    plan : Plan

    Raises
    ------
    NoJsonFoundError
        If the response holds no JSON array.
    SchemaMismatchError
        If the array does not follow the plan schema.
    """
    return Plan.from_list(extract_json(text, list))


def parse_extracted_graph(text, validate=True):
    """Decode the task graph in a model response.

    Parameters
    ----------
    text : str
        The response.
    validate : bool
        Check the task-graph invariants (achievability included).

    Returns
    -------
    graph : TaskGraph

    Raises
    ------
    NoJsonFoundError
        If the response holds no JSON object.
    SchemaMismatchError
        If the object does not follow the task-graph schema.
    InvariantViolationError
        If ``validate`` and the graph breaks an invariant.
    """
    return TaskGraph.from_dict(extract_json(text, dict), validate=validate)
