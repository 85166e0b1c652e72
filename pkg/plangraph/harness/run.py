"""Model evaluation runs."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..core import ErrorKind
from ..errors import InvariantViolationError, PlanGraphError
from ..evaluator import PlanVerdict, validate_plan
from ..metrics import CaseRecord, aggregate_by, score_run
from ..utils.utils import _parallel_map, write_json, write_jsonl
from .endpoint import ChatClient, ModelEndpointConfig
from .parse import parse_extracted_graph, parse_plan
from .prompts import TemplateKind, build_prompt
from .similarity import DEFAULT_WEIGHTS, graph_similarity

logger = logging.getLogger(__name__)


class Pipeline(str, Enum):
    """How the model gets to a plan."""

    PLAN_DIRECT = "PlanDirect"
    PLAN_ON_GRAPH = "PlanOnGraph"
    EXTRACT_THEN_PLAN = "ExtractThenPlan"

    def __str__(self):
        return self.value


@dataclass
class RunResult:
    """Everything a run produced.

    Parameters
    ----------
    records : list of dict
        Per-instance record: responses, parsed output, verdict, similarity.
    cases : list of CaseRecord
        Scored cases, in instance order.
    report : RunReport
        Aggregate metrics.
    files : dict
        Written artifact paths, keyed by name.
    """

    records: list
    cases: list
    report: object
    files: dict = field(default_factory=dict)


def _ask(client, prompt, responses):
    reply = client.complete([{"role": "user", "content": prompt}])
    responses.append({"prompt": prompt, "response": reply})
    return reply


def _failure(exc, stage):
    return PlanVerdict.failed(
        ErrorKind.MALFORMED_PLAN, f"{stage}: {exc}", failure=type(exc).__name__
    )


class _Runner:
    def __init__(self, pipeline, client, weights):
        self.pipeline = Pipeline(pipeline)
        self.client = client
        self.weights = weights

    def __call__(self, item):
        position, instance = item
        opt = instance.optimal.objective
        meta = dict(getattr(instance, "meta", {}) or {})
        record = {
            "index": getattr(instance, "index", position),
            "pipeline": str(self.pipeline),
            "responses": [],
        }
        try:
            verdict = self._run(instance, record)
        except Exception as exc:  # one instance never aborts the run
            logger.warning("Instance %s failed: %s", record["index"], exc)
            verdict = _failure(exc, "run")
        case = CaseRecord(verdict, opt, meta)
        record["case"] = case.to_dict()
        return record, case

    def _run(self, instance, record):
        responses = record["responses"]
        if self.pipeline is Pipeline.PLAN_ON_GRAPH:
            planning_graph = instance.graph
            prompt = build_prompt(TemplateKind.GRAPH_PLANNING, planning_graph)
        elif self.pipeline is Pipeline.PLAN_DIRECT:
            prompt = build_prompt(TemplateKind.QUERY_PLANNING, instance.query)
        else:
            extract = build_prompt(TemplateKind.EXTRACT_GRAPH, instance.query)
            reply = _ask(self.client, extract, responses)
            try:
                planning_graph = parse_extracted_graph(reply)
            except InvariantViolationError as exc:
                record["extraction_error"] = str(exc)
                planning_graph = parse_extracted_graph(reply, validate=False)
            except PlanGraphError as exc:
                record["extraction_error"] = str(exc)
                return _failure(exc, "extraction")
            record["extracted_graph"] = planning_graph.to_dict()
            exact, similarity = graph_similarity(
                planning_graph, instance.graph, self.weights
            )
            record["similarity"] = {"exact_match": exact, "similarity": similarity}
            prompt = build_prompt(TemplateKind.GRAPH_PLANNING, planning_graph)
        reply = _ask(self.client, prompt, responses)
        try:
            plan = parse_plan(reply)
        except PlanGraphError as exc:
            return _failure(exc, "plan parsing")
        record["plan"] = plan.to_list()
        # always scored against the gold graph
        return validate_plan(instance.graph, plan, instance.optimal.objective)


def run_eval(instances, pipeline, endpoint, out_dir=None, n_jobs=None, progress=False):
    """Evaluate a model on a set of instances.

    Parameters
    ----------
    instances : list of LabeledInstance
        Instances with their gold graph and optimum; ``PlanDirect`` and
        ``ExtractThenPlan`` also need the textual ``query``.
    pipeline : Pipeline | str
        ``"PlanDirect"``, ``"PlanOnGraph"`` or ``"ExtractThenPlan"``.
    endpoint : ModelEndpointConfig | object
        Endpoint configuration, or any client exposing
        ``complete(messages) -> str``.
    out_dir : path-like | None
        If given, write ``responses.jsonl``, ``verdicts.jsonl``,
        ``report.csv`` and ``report.json`` there.
    n_jobs : int | None
        Worker threads; defaults to the endpoint's ``max_concurrency``.
    progress : bool
        Show a progress bar on standard error.

    Returns
    -------
    result : RunResult
    """
    pipeline = Pipeline(pipeline)
    instances = list(instances)
    if pipeline is not Pipeline.PLAN_ON_GRAPH:
        missing = [
            ii for ii, inst in enumerate(instances) if not getattr(inst, "query", None)
        ]
        if missing:
            raise ValueError(
                f"The {pipeline} pipeline needs a textual query; "
                f"{len(missing)} instance(s) have none (first: {missing[0]})"
            )
    weights = DEFAULT_WEIGHTS
    if isinstance(endpoint, ModelEndpointConfig):
        weights = endpoint.similarity_weights
        if n_jobs is None:
            n_jobs = endpoint.max_concurrency
        endpoint = ChatClient(endpoint)
    runner = _Runner(pipeline, endpoint, weights)
    results = _parallel_map(
        runner,
        list(enumerate(instances)),
        n_jobs=n_jobs or 1,
        desc=f"{pipeline}" if progress else None,
        executor="thread",
    )
    records = [record for record, _ in results]
    cases = [case for _, case in results]
    result = RunResult(records, cases, score_run(cases) if cases else None)
    if out_dir is not None:
        result.files = write_run(result, out_dir)
    return result


def write_run(result, out_dir):
    """Write the artifacts of a run and return their paths."""
    out_dir = Path(out_dir)
    files = {
        "responses": out_dir / "responses.jsonl",
        "verdicts": out_dir / "verdicts.jsonl",
        "report_csv": out_dir / "report.csv",
        "report_json": out_dir / "report.json",
    }
    responses, verdicts = [], []
    for record in result.records:
        keys = ("index", "pipeline", "responses")
        responses.append({key: record[key] for key in keys})
        line = {k: v for k, v in record.items() if k not in ("responses", "case")}
        line.update(record["case"])
        verdicts.append(line)
    write_jsonl(files["responses"], responses)
    write_jsonl(files["verdicts"], verdicts)
    if result.cases:
        keys = ("node_count", "structure")
        if not all(key in case.meta for case in result.cases for key in keys):
            keys = ()
        aggregate_by(keys, result.cases).to_csv(files["report_csv"])
        write_json(files["report_json"], result.report.to_dict())
    return files
