import json

import pytest

from plangraph.core import Plan, Rule, TaskGraph, compare_plans, read_task_graph
from plangraph.dataset import emit_dpo, emit_sft, label_instance
from plangraph.harness import planning_prompt
from plangraph.utils import _get_test_fname

example = label_instance(read_task_graph(_get_test_fname("example_graph.json")))
single = label_instance(TaskGraph([Rule(0, {"N1"}, "N2", 5, 1)], {"N1"}, "N2"))


def test_emit_sft():
    """Test the supervised records in both modes."""
    records = emit_sft([example, single])
    assert len(records) == 2
    assert records[0]["input"] == example.graph.to_json()
    assert Plan.from_json(records[0]["output"]) == example.optimal.plan
    assert records[0]["prompt"] == planning_prompt(example.graph)
    assert records[0]["input"] in records[0]["prompt"]
    mixed = emit_sft([example, single], mode="opt+feas")
    assert len(mixed) == 3
    assert [r["input"] for r in mixed] == [example.graph.to_json()] * 2 + [
        single.graph.to_json()
    ]
    assert Plan.from_json(mixed[1]["output"]) == example.second_best.plan
    with pytest.raises(ValueError, match="mode"):
        emit_sft([example], mode="all")


def test_emit_dpo():
    """Test preference triples and skipped instances."""
    records = emit_dpo([example, single, example])
    assert len(records) == 2
    (record, _) = records
    assert set(record) == {"input", "chosen", "rejected", "prompt"}
    assert record["chosen"] != record["rejected"]
    chosen = [sub["target"] for sub in json.loads(record["chosen"])]
    assert chosen == [["N2"], ["N3"], ["N4"], ["N5"]]
    assert example.second_best.objective == (8, 2)
    assert compare_plans(example.optimal.objective, example.second_best.objective) == -1
    assert emit_dpo([single]) == []
