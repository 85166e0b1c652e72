"""Textual query generation with an extraction round-trip check."""

import logging
from dataclasses import dataclass

from ..errors import AllRoundsFailedError, PlanGraphError
from .parse import parse_extracted_graph
from .prompts import TemplateKind, build_prompt
from .similarity import DEFAULT_WEIGHTS, graph_similarity, mismatch_report

logger = logging.getLogger(__name__)

SELF_CORRECTION_PROMPT = (
    "The story does not describe the task exactly. Reading it back gives these "
    "differences:\n{report}\n\n"
    "Rewrite the story so that it states every rule of the task, each with its "
    "time and cost, and nothing else. Only output the story."
)


@dataclass(frozen=True)
class QueryResult:
    """A generated query and how it was obtained.

    Parameters
    ----------
    query : str
        The story.
    similarity : float
        Similarity of the story's extracted graph to the source graph.
    rounds : list of dict
        One entry per round: story, extracted graph, exact match, similarity
        and mismatch report.
    """

    query: str
    similarity: float
    rounds: list


def generate_query(
    graph, client, max_rounds=3, weights=DEFAULT_WEIGHTS, correction=None
):
    """Turn a task graph into a textual query, checking it by re-extraction.

    Every round asks for a story, extracts a graph back from it and compares
    that graph with ``graph``. On a mismatch the model is shown the
    differences and asked again.

    Parameters
    ----------
    graph : TaskGraph
        The source graph.
    client : object
        Exposes ``complete(messages) -> str``.
    max_rounds : int
        Largest number of stories requested.
    weights : tuple of float
        Graph similarity weights.
    correction : str | None
        Follow-up message template; ``{report}`` is replaced by the
        mismatch report.

    Returns
    -------
    result : QueryResult
        With an exactly matching story.

    Raises
    ------
    AllRoundsFailedError
        If no round matched; carries the most similar story and the rounds.
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    correction = SELF_CORRECTION_PROMPT if correction is None else correction
    prompt = build_prompt(TemplateKind.GENERATE_QUERY, graph)
    messages = [{"role": "user", "content": prompt}]
    rounds, best = [], (None, None)
    for round_no in range(1, max_rounds + 1):
        entry = {
            "round": round_no,
            "story": None,
            "exact_match": False,
            "similarity": None,
        }
        rounds.append(entry)
        try:
            story = client.complete(messages)
        except PlanGraphError as exc:
            entry["report"] = f"no story: {exc}"
            logger.warning("Round %d: %s", round_no, entry["report"])
            continue
        entry["story"] = story
        try:
            extract = build_prompt(TemplateKind.EXTRACT_GRAPH, story)
            reply = client.complete([{"role": "user", "content": extract}])
            extracted = parse_extracted_graph(reply, validate=False)
        except PlanGraphError as exc:
            report = f"- the story could not be read back as a task graph ({exc})"
        else:
            entry["extracted_graph"] = extracted.to_dict()
            exact, similarity = graph_similarity(extracted, graph, weights)
            entry.update(exact_match=exact, similarity=similarity)
            if best[1] is None or similarity > best[1]:
                best = (story, similarity)
            if exact:
                entry["report"] = ""
                return QueryResult(story, similarity, rounds)
            report = mismatch_report(extracted, graph)
        entry["report"] = report
        logger.info("Round %d: story does not match its graph", round_no)
        messages = messages + [
            {"role": "assistant", "content": story},
            {"role": "user", "content": correction.replace("{report}", report)},
        ]
    raise AllRoundsFailedError(best[0], best[1], rounds)
