import threading
import time
from dataclasses import replace

import pytest
import requests

from plangraph.core import ErrorKind, TaskGraph, compare_plans
from plangraph.dataset import label_instance
from plangraph.errors import InvariantViolationError
from plangraph.evaluator import Status
from plangraph.graphgen import GenConfig, build_task_graph, derive_seed, instance_meta
from plangraph.harness import ModelEndpointConfig, Pipeline, run_eval
from plangraph.solver import optimal_plan
from plangraph.utils import read_json, read_jsonl


def _instances(n=4):
    out = []
    for ii in range(n):
        cfg = GenConfig(
            node_count=8,
            structure="tree" if ii % 2 else "random",
            seed=derive_seed(3, ii),
        )
        graph = build_task_graph(cfg)
        inst = label_instance(graph, instance_meta(cfg, graph), index=ii)
        out.append(replace(inst, query=f"Story number {ii} about a factory."))
    return out


class OracleClient:
    """Answers with the gold graph or the optimal plan of the instance asked about."""

    def __init__(self, instances):
        self.instances = instances
        self.calls = 0

    def complete(self, messages):
        self.calls += 1
        prompt = messages[-1]["content"]
        for inst in self.instances:
            if inst.query in prompt:
                return f"Extracted:\n```json\n{inst.graph.to_json()}\n```"
        for inst in self.instances:
            if inst.graph.to_json() in prompt:
                return f"```json\n{inst.optimal.plan.to_json()}\n```"
        raise AssertionError("unknown prompt")


class GarbageClient:
    def complete(self, messages):
        return "I am not able to help with that."


class LossyClient:
    """Extracts the gold graph without one rule and plans on that graph."""

    def __init__(self, instance, dropped):
        gold = instance.graph
        rules = [rule for rule in gold.rules if rule.id != dropped]
        self.instance = instance
        self.extracted = TaskGraph(rules, gold.initial_sources, gold.target)
        self.solution = optimal_plan(self.extracted)

    def complete(self, messages):
        if self.instance.query in messages[-1]["content"]:
            return f"```json\n{self.extracted.to_json()}\n```"
        return f"```json\n{self.solution.plan.to_json()}\n```"


def _lossy_client(instances):
    """A client whose extraction loses a rule the gold optimum needs."""
    for inst in instances:
        for rule_id in inst.optimal.rule_ids:
            try:
                client = LossyClient(inst, rule_id)
            except InvariantViolationError:
                continue
            if compare_plans(inst.optimal.objective, client.solution.objective) < 0:
                return client
    raise AssertionError("every optimum survives the loss of any one rule")


class _Reply:
    status_code = 200

    def raise_for_status(self):
        pass

    def json(self):
        return {"choices": [{"message": {"content": "no plan today"}}]}


def test_run_eval_oracle(tmp_path):
    """Test that gold answers score perfectly."""
    instances = _instances(50)
    client = OracleClient(instances)
    result = run_eval(instances, "PlanOnGraph", client, out_dir=tmp_path)
    assert client.calls == len(instances)
    report = result.report
    assert report.optimal_rate == report.success_rate == 1
    assert report.avg_time_ratio == report.avg_cost_ratio == 1
    assert [case.verdict.status for case in result.cases] == [Status.OPTIMAL] * 50
    assert [record["index"] for record in result.records] == list(range(50))

    assert set(result.files) == {"responses", "verdicts", "report_csv", "report_json"}
    responses = read_jsonl(result.files["responses"])
    assert len(responses) == 50
    assert responses[0]["pipeline"] == "PlanOnGraph"
    assert len(responses[0]["responses"]) == 1
    verdicts = read_jsonl(result.files["verdicts"])
    assert verdicts[2]["verdict"]["status"] == "Optimal"
    assert verdicts[2]["plan"] == instances[2].optimal.plan.to_list()
    assert read_json(result.files["report_json"])["optimal_rate"] == 1.0
    header = result.files["report_csv"].read_text().splitlines()[0]
    assert header.startswith("node_count,structure,n,")


def test_run_eval_extract_then_plan():
    """Test the two-step pipeline records the extraction."""
    instances = _instances(2)
    client = OracleClient(instances)
    result = run_eval(instances, Pipeline.EXTRACT_THEN_PLAN, client)
    assert client.calls == 4
    assert result.report.optimal_rate == 1
    record = result.records[1]
    assert record["similarity"] == {
        "exact_match": True,
        "similarity": pytest.approx(1.0),
    }
    assert record["extracted_graph"] == instances[1].graph.to_dict()
    assert len(record["responses"]) == 2
    # the direct pipeline answers from the story alone
    direct = run_eval(instances, "PlanDirect", GarbageClient())
    assert direct.report.n_failed == 2


def test_run_eval_garbage():
    """Test that unusable answers fail with the penalty ratios."""
    instances = _instances(3)
    result = run_eval(instances, "PlanOnGraph", GarbageClient(), n_jobs=2)
    report = result.report
    assert report.n_failed == 3
    assert report.success_rate == 0
    assert report.avg_time_ratio == report.avg_cost_ratio == 4
    verdict = result.cases[0].verdict
    assert verdict.errors == {ErrorKind.MALFORMED_PLAN}
    assert verdict.failure == "NoJsonFoundError"


def test_run_eval_needs_query():
    """Test that text pipelines refuse instances without a query."""
    instances = [replace(inst, query=None) for inst in _instances(1)]
    with pytest.raises(ValueError, match="textual query"):
        run_eval(instances, "ExtractThenPlan", GarbageClient())
    with pytest.raises(ValueError):
        run_eval(instances, "PlanSomehow", GarbageClient())


def test_run_eval_lossy_extraction():
    """Test a plan made on a wrong extraction is scored against the gold optimum."""
    client = _lossy_client(_instances(8))
    inst = client.instance
    result = run_eval([inst], Pipeline.EXTRACT_THEN_PLAN, client)
    record = result.records[0]
    assert record["similarity"]["exact_match"] is False
    assert record["similarity"]["similarity"] < 1
    assert record["extracted_graph"] == client.extracted.to_dict()
    (case,) = result.cases
    assert case.opt == inst.optimal.objective
    assert case.verdict.status is Status.FEASIBLE
    assert case.time_ratio >= 1
    assert result.report.optimal_rate == 0
    assert result.report.success_rate == 1


@pytest.mark.timeout(60)
def test_run_eval_bounded_concurrency(monkeypatch):
    """Test no more requests are in flight than the endpoint allows."""
    lock = threading.Lock()
    state = {"active": 0, "peak": 0, "calls": 0}

    def post(self, url, json=None, headers=None, timeout=None):
        with lock:
            state["active"] += 1
            state["calls"] += 1
            state["peak"] = max(state["peak"], state["active"])
        time.sleep(0.02)
        with lock:
            state["active"] -= 1
        return _Reply()

    monkeypatch.setattr(requests.Session, "post", post)
    config = ModelEndpointConfig(
        base_url="http://localhost:8000/v1", model="tiny", max_concurrency=2
    )
    instances = _instances(16)
    result = run_eval(instances, "PlanOnGraph", config, n_jobs=8)
    assert state["calls"] == 16
    assert state["peak"] == 2
    assert result.report.n_failed == 16
    assert result.cases[0].verdict.failure == "NoJsonFoundError"
