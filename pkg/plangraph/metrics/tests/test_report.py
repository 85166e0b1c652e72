from fractions import Fraction

import pytest

from plangraph.core import ErrorKind, Plan, SubPlan, read_plan, read_task_graph
from plangraph.errors import EmptyRunError
from plangraph.evaluator import PlanVerdict, validate_plan
from plangraph.metrics import (
    FAILURE_PENALTY,
    CaseRecord,
    aggregate_by,
    format_report,
    format_value,
    score_run,
)
from plangraph.utils import _get_test_fname, requires_pandas

graph = read_task_graph(_get_test_fname("example_graph.json"))
plan = read_plan(_get_test_fname("example_plan.json"))
OPT = (7, 4)

optimal = validate_plan(graph, plan, OPT)
feasible = validate_plan(
    graph,
    Plan([SubPlan("a", {"N1"}, "N2"), SubPlan("b", {"N2"}, "N5", ("a",))]),
    OPT,
)
failed = PlanVerdict.failed(ErrorKind.INVALID_SUBTASK, "no such rule")


def _case(verdict, **meta):
    return CaseRecord(verdict, OPT, meta)


def test_rates():
    """Test the status rates of a run of 1,000 cases."""
    cases = [_case(optimal)] * 392 + [_case(feasible)] * 508 + [_case(failed)] * 100
    report = score_run(cases)
    assert report.n == 1000
    assert report.optimal_rate + report.feasible_rate == report.success_rate
    row = report.row()
    assert (row["Optimal Rate"], row["Feasible Rate"], row["Success Rate"]) == (
        "39.2",
        "50.8",
        "90.0",
    )
    assert report.to_dict()["success_rate"] == 0.9
    assert repr(report).startswith("<RunReport | 1000 cases>")


def test_ratios():
    """Test the time and cost ratios with the failure penalty."""
    report = score_run([_case(optimal), _case(failed)])
    assert report.avg_time_ratio == Fraction(5, 2)
    assert report.avg_cost_ratio == Fraction(5, 2)
    assert format_value("Avg Time Ratio", report.avg_time_ratio) == "2.500"
    report = score_run([_case(optimal)] * 3)
    assert report.avg_time_ratio == report.avg_cost_ratio == 1
    assert report.optimal_rate == 1
    # a feasible plan can be cheaper than the optimum
    record = _case(feasible)
    assert record.time_ratio == Fraction(8, 7)
    assert record.cost_ratio == Fraction(1, 2)
    assert _case(failed).time_ratio == FAILURE_PENALTY
    # plain (verdict, opt) pairs are accepted
    assert score_run([(optimal, OPT)]).n_optimal == 1


def test_parallel_ratio():
    """Test the mean parallel ratio over successful plans."""
    assert _case(optimal).parallel_ratio == Fraction(7, 10)
    assert _case(feasible).parallel_ratio == 1
    assert _case(failed).parallel_ratio is None
    report = score_run([_case(optimal), _case(feasible), _case(failed)])
    assert report.parallel_ratio == Fraction(17, 20)
    assert score_run([_case(failed)]).parallel_ratio is None


def test_empty_run():
    """Test that an empty run is rejected."""
    with pytest.raises(EmptyRunError):
        score_run([])


def test_case_record_codec():
    """Test records survive the JSON dict form."""
    record = _case(feasible, node_count=10, structure="tree")
    decoded = CaseRecord.from_dict(record.to_dict())
    assert decoded.opt == OPT
    assert decoded.meta == {"node_count": 10, "structure": "tree"}
    assert decoded.time_ratio == record.time_ratio
    assert decoded.parallel_ratio == record.parallel_ratio


def test_aggregate_by(tmp_path):
    """Test grouped tables and their CSV export."""
    cases = [
        _case(optimal, node_count=30, edge_count=45, structure="tree"),
        _case(failed, node_count=10, edge_count=12, structure="random"),
        _case(optimal, node_count=10, edge_count=19, structure="tree"),
    ]
    table = aggregate_by("node_count", cases)
    assert [row["node_count"] for row in table] == [10, 30]
    assert table[0]["n"] == 2
    assert table[0]["Optimal Rate"] == Fraction(1, 2)
    assert table[1]["Avg Time Ratio"] == 1
    assert repr(table) == "<ReportTable | 2 groups by node_count>"
    buckets = aggregate_by("edge_bucket", cases)
    assert [row["edge_bucket"] for row in buckets] == [10, 40]
    assert buckets[0]["n"] == 2
    pairs = aggregate_by(("structure", "node_count"), cases)
    assert [(row["structure"], row["node_count"]) for row in pairs] == [
        ("random", 10),
        ("tree", 10),
        ("tree", 30),
    ]
    with pytest.raises(ValueError, match="colour"):
        aggregate_by("colour", cases)

    fname = tmp_path / "table.csv"
    table.to_csv(fname)
    lines = fname.read_text().splitlines()
    assert lines[0].startswith("node_count,n,Optimal Rate,Success Rate")
    assert lines[1].startswith("10,2,50.0,50.0,0.0,2.500")
    text = format_report(table)
    assert text.splitlines()[0].split()[0] == "node_count"
    assert len(text.splitlines()) == 3


@requires_pandas
def test_to_pandas():
    """Test the DataFrame export."""
    table = aggregate_by("node_count", [_case(optimal, node_count=10)])
    df = table.to_pandas()
    assert list(df.columns[:2]) == ["node_count", "n"]
    assert df.loc[0, "Optimal Rate"] == "100.0"


def test_format_value():
    """Test column formatting."""
    assert format_value("Success Rate", Fraction(1, 3)) == "33.3"
    assert format_value("Parallel Ratio", None) == ""
    assert format_value("n", 12) == "12"
