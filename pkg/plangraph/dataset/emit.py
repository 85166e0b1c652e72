"""Training files: SFT pairs, DPO triples and the dataset manifest."""

import logging
from pathlib import Path

from ..harness.prompts import planning_prompt
from ..utils.check import _check_option
from ..utils.utils import file_digest, write_json, write_jsonl

logger = logging.getLogger(__name__)

SFT_MODES = ("opt", "opt+feas")

#: ``--emit`` choices and the file each one writes.
EMIT_FILES = {
    "sft-opt": "sft_opt.jsonl",
    "sft-mixed": "sft_mixed.jsonl",
    "dpo": "dpo.jsonl",
}


def _sft_record(graph, solution):
    return {
        "input": graph.to_json(),
        "output": solution.plan.to_json(),
        "prompt": planning_prompt(graph),
    }


def emit_sft(instances, mode="opt"):
    """Build supervised fine-tuning records.

    Parameters
    ----------
    instances : list of LabeledInstance
        Labelled instances.
    mode : "opt" | "opt+feas"
        ``"opt"`` emits the optimal plan of every instance; ``"opt+feas"``
        also emits the second-best plan where there is one.

    Returns
    -------
    records : list of dict
        ``{"input", "output", "prompt"}`` records. The input is the task graph
        JSON, the output the plan JSON and the prompt the graph-planning
        prompt wrapping the input.
    """
    _check_option("mode", mode, SFT_MODES)
    records = []
    for inst in instances:
        records.append(_sft_record(inst.graph, inst.optimal))
        if mode == "opt+feas" and inst.second_best is not None:
            records.append(_sft_record(inst.graph, inst.second_best))
    return records


def emit_dpo(instances):
    """Build preference records from the optimal and second-best plans.

    Instances without a second-best plan are skipped.

    Returns
    -------
    records : list of dict
        ``{"input", "chosen", "rejected", "prompt"}`` records.
    """
    records = []
    for inst in instances:
        if inst.second_best is None:
            continue
        records.append(
            {
                "input": inst.graph.to_json(),
                "chosen": inst.optimal.plan.to_json(),
                "rejected": inst.second_best.plan.to_json(),
                "prompt": planning_prompt(inst.graph),
            }
        )
    skipped = len(instances) - len(records)
    if skipped:
        logger.info("Skipped %d instance(s) without a second-best plan", skipped)
    return records


def _records(instances, emit):
    if emit == "sft-opt":
        return emit_sft(instances, "opt")
    if emit == "sft-mixed":
        return emit_sft(instances, "opt+feas")
    return emit_dpo(instances)


def write_dataset(instances, out_dir, emit=tuple(EMIT_FILES), spec=None, seed=None):
    """Write a labelled dataset and its training files.

    Parameters
    ----------
    instances : list of LabeledInstance
        The instances, in order.
    out_dir : path-like
        Output directory, created if needed.
    emit : iterable of str
        Training files to write among ``"sft-opt"``, ``"sft-mixed"`` and
        ``"dpo"``. ``instances.jsonl`` is always written.
    spec : DatasetSpec | list of DatasetRow | None
        Recorded in the manifest.
    seed : int | None
        Master seed, recorded in the manifest.

    Returns
    -------
    files : dict
        Paths of the written files keyed by name, ``manifest`` included.
    """
    out_dir = Path(out_dir)
    instances = list(instances)
    emit = [_check_option("emit", name, EMIT_FILES) for name in emit]
    files = {"instances": out_dir / "instances.jsonl"}
    lines = (inst.to_dict() for inst in instances)
    counts = {"instances": write_jsonl(files["instances"], lines)}
    skipped = {}
    for name in emit:
        files[name] = out_dir / EMIT_FILES[name]
        counts[name] = write_jsonl(files[name], _records(instances, name))
        if name == "dpo":
            skipped[name] = len(instances) - counts[name]
    if spec is not None:
        rows = getattr(spec, "rows", spec)
        spec = [row.model_dump(mode="json") for row in rows]
    manifest = {
        "spec": spec,
        "seed": seed,
        "counts": counts,
        "skipped": skipped,
        "sha256": {path.name: file_digest(path) for path in files.values()},
    }
    files["manifest"] = out_dir / "manifest.json"
    write_json(files["manifest"], manifest)
    return files
