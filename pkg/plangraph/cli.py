"""Command-line interface: ``plangraph <command> ...``.

Exit status is 0 on success, 1 when some items failed (a failed plan, a failed
instance of a run, a query that never matched its graph) and 2 on usage or
configuration errors.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .core import read_plan, read_task_graph
from .dataset import EMIT_FILES, build_dataset, read_instances, write_dataset
from .errors import AllRoundsFailedError
from .evaluator import error_proportions, validate_plan
from .graphgen import TEST_SPEC, TRAIN_SPEC, DatasetSpec, generate_batch
from .harness import ChatClient, ModelEndpointConfig, Pipeline, generate_query, run_eval
from .metrics import GROUP_KEYS, CaseRecord, aggregate_by, format_report, score_run
from .solver import solve
from .utils import read_json, read_jsonl, set_log_level, write_json, write_jsonl
from .utils.utils import _dumps

logger = logging.getLogger(__name__)

NAMED_SPECS = {"train": TRAIN_SPEC, "test": TEST_SPEC}


def _u64(value):
    value = int(value)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64), got {value}")
    return value


def _positive(value):
    value = int(value)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _group_keys(value):
    if value == "none":
        return ()
    keys = tuple(key.strip() for key in value.split(","))
    for key in keys:
        if key not in GROUP_KEYS:
            raise argparse.ArgumentTypeError(
                f"unknown group key {key!r}, choose among "
                f"{', '.join(GROUP_KEYS)} or none"
            )
    return keys


def _load_spec(value, seed):
    if value in NAMED_SPECS:
        return DatasetSpec(seed=seed or 0, rows=NAMED_SPECS[value])
    spec = DatasetSpec.model_validate(read_json(value))
    if seed is not None:
        spec = spec.model_copy(update={"seed": seed})
    return spec


def _emit_json(obj, out):
    if out is None:
        sys.stdout.write(_dumps(obj, indent=4) + "\n")
    else:
        write_json(out, obj)


def cmd_gen(args):
    spec = _load_spec(args.config, args.seed)
    batch = generate_batch(
        spec.rows, spec.seed, n_jobs=args.jobs, progress=args.progress
    )
    out = Path(args.out)
    write_jsonl(out, (item["graph"].to_dict() for item in batch))
    manifest = {
        "seed": spec.seed,
        "rows": [row.model_dump(mode="json") for row in spec.rows],
        "instances": [{"index": item["index"], **item["meta"]} for item in batch],
    }
    write_json(out.with_name(out.stem + ".manifest.json"), manifest)
    return 0


def cmd_solve(args):
    graph = read_task_graph(args.graph)
    optimal, second = solve(graph, second_best=args.second_best)
    out = Path(args.out)
    write_json(out, optimal.plan.to_list())
    sidecar = optimal.to_dict()
    if args.second_best:
        sidecar["second_best"] = None
        if second is not None:
            sidecar["second_best"] = {"plan": second.plan.to_list(), **second.to_dict()}
    write_json(out.with_name(out.stem + ".objective.json"), sidecar)
    return 0


def cmd_validate(args):
    graph = read_task_graph(args.graph)
    verdict = validate_plan(graph, read_plan(args.plan))
    _emit_json(verdict.to_dict(), args.out)
    return 0 if verdict.succeeded else 1


def cmd_score(args):
    cases = [CaseRecord.from_dict(obj) for obj in read_jsonl(args.verdicts)]
    table = aggregate_by(args.group_by, cases, bucket_width=args.bucket_width)
    table.to_csv(args.out)
    out = Path(args.out)
    proportions = error_proportions(case.verdict for case in cases)
    write_json(
        out.with_name(out.stem + ".errors.json"),
        {str(kind): value for kind, value in proportions.items()},
    )
    if cases:
        print(format_report(score_run(cases)), file=sys.stderr)
    return 0


def cmd_dataset(args):
    spec = _load_spec(args.spec, args.seed)
    instances = build_dataset(spec, n_jobs=args.jobs, progress=args.progress)
    write_dataset(instances, args.out_dir, emit=args.emit, spec=spec, seed=spec.seed)
    return 0


def cmd_eval(args):
    endpoint = ModelEndpointConfig.from_file(args.endpoint)
    instances = read_instances(args.instances)
    result = run_eval(
        instances,
        args.pipeline,
        endpoint,
        out_dir=args.out_dir,
        n_jobs=args.jobs,
        progress=args.progress,
    )
    if result.report is not None:
        print(format_report(result.report), file=sys.stderr)
    failed = sum(case.verdict.failure is not None for case in result.cases)
    if failed:
        logger.warning(
            "%d of %d instance(s) produced no plan", failed, len(result.cases)
        )
    return 1 if failed else 0


def _query_jobs(args):
    if args.graph is not None:
        return [(None, read_task_graph(args.graph))]
    return [(inst, inst.graph) for inst in read_instances(args.instances)]


def cmd_genquery(args):
    endpoint = ModelEndpointConfig.from_file(args.endpoint)
    jobs = _query_jobs(args)
    client = ChatClient(endpoint)
    outputs, failed = [], 0
    for inst, graph in jobs:
        try:
            result = generate_query(
                graph,
                client,
                args.rounds,
                endpoint.similarity_weights,
                endpoint.self_correction_prompt,
            )
            query, similarity, rounds = result.query, result.similarity, result.rounds
            best = query
        except AllRoundsFailedError as exc:
            failed += 1
            logger.warning("No exact story after %d round(s): %s", args.rounds, exc)
            query, best, similarity, rounds = None, exc.best, exc.similarity, exc.rounds
        if inst is None:
            outputs.append(
                {
                    "query": query,
                    "best": best,
                    "similarity": similarity,
                    "rounds": rounds,
                }
            )
        else:
            outputs.append(replace(inst, query=query).to_dict())
    if args.graph is not None:
        _emit_json(outputs[0], args.out)
    else:
        write_jsonl(args.out, outputs)
    return 1 if failed else 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="plangraph", description="Parallel task-graph planning benchmark."
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug messages."
    )
    verbosity.add_argument("--quiet", action="store_true", help="Log errors only.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, summary):
        p = sub.add_parser(name, help=summary)
        p.set_defaults(func=func)
        return p

    def batch_flags(p):
        p.add_argument(
            "--jobs",
            type=_positive,
            default=None,
            help="Number of workers (default: all cores).",
        )
        p.add_argument("--progress", action="store_true", help="Show a progress bar.")

    p = command("gen", cmd_gen, "Generate task graphs.")
    p.add_argument(
        "--config", required=True, help="Generation config JSON, or 'train' / 'test'."
    )
    p.add_argument("--out", required=True, help="Output JSONL file.")
    p.add_argument("--seed", type=_u64, default=None, help="Override the master seed.")
    batch_flags(p)

    p = command("solve", cmd_solve, "Compute the optimal plan of a task graph.")
    p.add_argument("--graph", required=True, help="Task graph JSON.")
    p.add_argument("--out", required=True, help="Output plan JSON.")
    p.add_argument(
        "--second-best", action="store_true", help="Also compute the second-best plan."
    )

    p = command("validate", cmd_validate, "Validate a plan against a task graph.")
    p.add_argument("--graph", required=True, help="Task graph JSON.")
    p.add_argument("--plan", required=True, help="Plan JSON.")
    p.add_argument(
        "--out", default=None, help="Verdict JSON (default: standard output)."
    )

    p = command("score", cmd_score, "Aggregate scored cases into a report.")
    p.add_argument("--verdicts", required=True, help="verdicts.jsonl of a run.")
    p.add_argument(
        "--group-by",
        type=_group_keys,
        default=(),
        help=f"Comma-separated keys among {', '.join(GROUP_KEYS)}, or none.",
    )
    p.add_argument(
        "--bucket-width",
        type=_positive,
        default=10,
        help="Width of the edge_bucket groups.",
    )
    p.add_argument(
        "--out",
        required=True,
        help="Output CSV file; error proportions go to <stem>.errors.json.",
    )

    p = command("dataset", cmd_dataset, "Build a labelled dataset and training files.")
    p.add_argument(
        "--spec", required=True, help="Dataset spec JSON, or 'train' / 'test'."
    )
    p.add_argument("--seed", type=_u64, default=None, help="Master seed.")
    p.add_argument("--out-dir", required=True, help="Output directory.")
    p.add_argument(
        "--emit",
        nargs="*",
        choices=list(EMIT_FILES),
        default=list(EMIT_FILES),
        help="Training files to write (default: all).",
    )
    batch_flags(p)

    p = command("eval", cmd_eval, "Evaluate a model on labelled instances.")
    p.add_argument("--instances", required=True, help="instances.jsonl.")
    p.add_argument(
        "--pipeline", required=True, choices=[str(name) for name in Pipeline]
    )
    p.add_argument("--endpoint", required=True, help="Endpoint config JSON.")
    p.add_argument("--out-dir", required=True, help="Output directory.")
    batch_flags(p)

    p = command("genquery", cmd_genquery, "Turn task graphs into textual queries.")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help="Task graph JSON.")
    source.add_argument("--instances", help="instances.jsonl to annotate with queries.")
    p.add_argument("--endpoint", required=True, help="Endpoint config JSON.")
    p.add_argument(
        "--rounds", type=_positive, default=3, help="Largest number of rounds."
    )
    p.add_argument(
        "--out", default=None, help="Output file (required with --instances)."
    )
    return parser


def main(argv=None):
    """Run the command line and return the exit status."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "genquery" and args.instances is not None and args.out is None:
        parser.error("genquery --instances needs --out")
    set_log_level("DEBUG" if args.verbose else "ERROR" if args.quiet else "WARNING")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"plangraph {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
