from functools import cmp_to_key

import pytest

from plangraph.core import (
    Plan,
    Rule,
    SubPlan,
    TaskGraph,
    compare_plans,
    read_plan,
    read_task_graph,
    simulate,
)
from plangraph.errors import MalformedPlanError, UnmatchedRuleError
from plangraph.utils import _get_test_fname

graph = read_task_graph(_get_test_fname("example_graph.json"))
plan = read_plan(_get_test_fname("example_plan.json"))


def test_simulate_example():
    """Test the end times of the example plan."""
    schedule = simulate(graph, plan)
    assert schedule.end_times == {
        "Subtask1": 3,
        "Subtask2": 4,
        "Subtask3": 6,
        "Subtask4": 7,
    }
    assert schedule.start_times["Subtask3"] == 4
    assert schedule.makespan == 7
    assert schedule.total_cost == 4
    assert schedule.sequential_time == 10
    assert schedule.to_dict()["cost"] == 4
    # deterministic
    assert simulate(graph, plan) == schedule


def test_simulate_edge_cases():
    """Test the empty plan, a fork-join plan and double charging."""
    empty = simulate(graph, Plan(()))
    assert (empty.makespan, empty.total_cost) == (0, 0)

    fork = TaskGraph(
        [
            Rule(0, {"N1"}, "N3", 5, 1),
            Rule(1, {"N2"}, "N4", 5, 1),
            Rule(2, {"N3", "N4"}, "N5", 2, 1),
        ],
        {"N1", "N2"},
        "N5",
    )
    join = Plan(
        [
            SubPlan("a", {"N1"}, "N3"),
            SubPlan("b", {"N2"}, "N4"),
            SubPlan("c", {"N3", "N4"}, "N5", ("a", "b")),
        ]
    )
    assert simulate(fork, join).makespan == 7

    twice = Plan([SubPlan("x", {"N1"}, "N2"), SubPlan("y", {"N1"}, "N2")])
    schedule = simulate(graph, twice)
    assert schedule.total_cost == 2
    assert schedule.makespan == 3


def test_simulate_errors():
    """Test unmatched rules and malformed plans."""
    invalid = Plan([SubPlan("Subtask1", {"N1"}, "N5")])
    with pytest.raises(UnmatchedRuleError) as err:
        simulate(graph, invalid)
    assert err.value.name == "Subtask1"
    unknown = Plan([SubPlan("Subtask1", {"N1"}, "N2", ("Subtask9",))])
    with pytest.raises(MalformedPlanError, match="unknown"):
        simulate(graph, unknown)
    cyclic = Plan(
        [
            SubPlan("a", {"N1"}, "N2", ("b",)),
            SubPlan("b", {"N2"}, "N5", ("a",)),
        ]
    )
    with pytest.raises(MalformedPlanError, match="cycle"):
        simulate(graph, cyclic)


def test_union_invariance():
    """Test that merging two plans keeps every end time."""
    other = Plan(
        [
            SubPlan("Other1", {"N1"}, "N2"),
            SubPlan("Other2", {"N2"}, "N5", ("Other1",)),
        ]
    )
    union = Plan(plan.subtasks + other.subtasks)
    a, b, both = simulate(graph, plan), simulate(graph, other), simulate(graph, union)
    assert b.makespan == 8
    assert both.makespan == max(a.makespan, b.makespan)
    for name, end in {**a.end_times, **b.end_times}.items():
        assert both.end_times[name] == end


def test_makespan_bounds():
    """Test that the makespan lies between the longest rule and the sum."""
    schedule = simulate(graph, plan)
    durations = [graph.match(sub.source, sub.target).time for sub in plan]
    assert max(durations) <= schedule.makespan <= sum(durations)


def test_compare_plans():
    """Test the lexicographic plan order."""
    assert compare_plans((7, 4), (8, 2)) == -1
    assert compare_plans((7, 4), (7, 4)) == 0
    assert compare_plans((5, 9), (5, 3)) == 1
    pairs = [(8, 2), (7, 4), (5, 9), (5, 3), (7, 1)]
    ordered = sorted(pairs, key=cmp_to_key(compare_plans))
    assert ordered == [(5, 3), (5, 9), (7, 1), (7, 4), (8, 2)]
    # agrees with makespan + eps * cost for a small enough eps
    eps = 1 / (sum(cost for _, cost in pairs) + 1)
    assert ordered == sorted(pairs, key=lambda p: p[0] + eps * p[1])


def test_plan_codec():
    """Test plan decoding and structural checks."""
    assert len(plan) == 4
    assert repr(plan)
    assert Plan.from_json(plan.to_json()) == plan
    assert plan.structure_errors() == {}
    doc = plan.to_list()
    doc[0]["target"] = "N2"
    assert Plan.from_list(doc).subtasks[0].target == "N2"
    duplicated = Plan([SubPlan("a", {"N1"}, "N2"), SubPlan("a", {"N6"}, "N3")])
    assert list(duplicated.structure_errors()) == ["MalformedPlan"]
