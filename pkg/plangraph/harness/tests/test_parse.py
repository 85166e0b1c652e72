import json

import pytest

from plangraph.core import TaskGraph, read_plan, read_task_graph
from plangraph.errors import NoJsonFoundError, SchemaMismatchError
from plangraph.harness import (
    FEWSHOT,
    extract_json,
    graph_similarity,
    mismatch_report,
    parse_extracted_graph,
    parse_plan,
)
from plangraph.utils import _get_test_fname

graph = read_task_graph(_get_test_fname("example_graph.json"))
plan = read_plan(_get_test_fname("example_plan.json"))
query_example = read_task_graph(_get_test_fname("query_example_graph.json"))


def _drop_rule(graph, rule_id):
    doc = graph.to_dict()
    doc["rules"] = [rule for rule in doc["rules"] if rule["id"] != rule_id]
    return TaskGraph.from_dict(doc, validate=False)


def test_parse_plan():
    """Test plans inside fences and after prose."""
    fenced = f"Sure! Here is the plan:\n```json\n{plan.to_json()}\n```\nDone."
    assert parse_plan(fenced) == plan
    # the last plan-like array wins over earlier arrays
    noisy = (
        f'Nodes: ["N1", "N6"]. First try: [{{"name": "x"}}]\n'
        f"Final:\n{plan.to_json()}"
    )
    assert parse_plan(noisy) == plan
    assert parse_plan(json.dumps(plan.to_list())) == plan


def test_parse_plan_errors():
    """Test responses without a usable plan."""
    with pytest.raises(NoJsonFoundError, match="array"):
        parse_plan("I cannot solve this task.")
    doc = plan.to_list()
    doc[1]["target"] = ["N3", "N4"]
    with pytest.raises(SchemaMismatchError) as err:
        parse_plan(json.dumps(doc))
    assert err.value.index == 1
    doc = plan.to_list()
    doc[2]["source"] = ["node two"]
    with pytest.raises(SchemaMismatchError) as err:
        parse_plan(json.dumps(doc))
    assert err.value.index == 2
    assert "source" in err.value.field


def test_parse_extracted_graph():
    """Test reading a task graph back, with a JSON repair."""
    with pytest.warns(RuntimeWarning, match="repaired"):
        extracted = parse_extracted_graph(FEWSHOT["query_example_plan"])
    assert extracted == query_example
    reply = f"The graph is\n{graph.to_json()}\nand the plan follows: {plan.to_json()}"
    assert parse_extracted_graph(reply) == graph
    with pytest.raises(NoJsonFoundError, match="object"):
        parse_extracted_graph("[1, 2, 3]")


def test_extract_json():
    """Test the kind preference."""
    text = '{"a": 1} then {"rules": []} then {"b": 2}'
    assert extract_json(text, dict) == {"rules": []}
    assert extract_json('{"a": 1} then {"b": 2}', dict) == {"b": 2}
    assert extract_json("[1, 2] and [3]", list) == [3]


def test_graph_similarity():
    """Test exact matches and the weighted score."""
    exact, similarity = graph_similarity(query_example, query_example)
    assert exact
    assert similarity == pytest.approx(1.0)
    exact, similarity = graph_similarity(_drop_rule(query_example, 8), query_example)
    assert not exact
    assert similarity == pytest.approx(0.8 * 8 / 9 + 0.2)
    assert round(similarity, 3) == 0.911
    # rule ids and order do not matter
    doc = query_example.to_dict()
    doc["rules"] = [dict(rule, id=8 - rule["id"]) for rule in reversed(doc["rules"])]
    assert graph_similarity(TaskGraph.from_dict(doc), query_example)[0]
    other_target = TaskGraph.from_dict({**query_example.to_dict(), "target": "N8"})
    exact, similarity = graph_similarity(other_target, query_example)
    assert not exact
    assert similarity == pytest.approx(0.9)
    assert graph_similarity(other_target, query_example, (0.5, 0.25, 0.25))[1] == 0.75


def test_mismatch_report():
    """Test the self-correction report."""
    assert mismatch_report(query_example, query_example) == ""
    report = mismatch_report(_drop_rule(query_example, 8), query_example)
    assert report == "- missing rule: N1 -> N9 (time 15, cost 1)"
    doc = query_example.to_dict()
    doc["initial_source"] = ["N1", "N3"]
    doc["target"] = "N8"
    lines = mismatch_report(TaskGraph.from_dict(doc, validate=False), query_example)
    assert lines.splitlines() == [
        "- initial sources are N1, N3, expected N1, N3, N7",
        "- target is N8, expected N9",
    ]
