"""Prompt templates and their rendering."""

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..errors import MissingBindingError

TEMPLATE_DIR = Path(__file__).parent / "templates"

PLACEHOLDERS = ("task", "graph_planning_example", "query_example", "query_example_plan")
_PLACEHOLDER_RE = re.compile(r"\{(" + "|".join(PLACEHOLDERS) + r")\}")


class TemplateKind(str, Enum):
    """The four prompt templates."""

    GRAPH_PLANNING = "graph_planning"
    QUERY_PLANNING = "query_planning"
    EXTRACT_GRAPH = "extract_graph"
    GENERATE_QUERY = "generate_query"

    def __str__(self):
        return self.value


def _read_asset(name):
    return (TEMPLATE_DIR / f"{name}.txt").read_text(encoding="utf-8")


@dataclass(frozen=True)
class PromptTemplate:
    """A prompt template with named placeholders.

    Parameters
    ----------
    kind : TemplateKind
        Which template this is.
    body : str
        The template text.
    """

    kind: TemplateKind
    body: str

    def __repr__(self):
        """Return a summary of the template."""
        names = ", ".join(self.placeholders)
        return f"<PromptTemplate | {self.kind}, placeholders: {names}>"

    @property
    def placeholders(self):
        """Placeholder names in order of first appearance."""
        return tuple(dict.fromkeys(_PLACEHOLDER_RE.findall(self.body)))

    def render(self, **bindings):
        """Shortcut for :func:`render_prompt`."""
        return render_prompt(self, bindings)


def load_template(kind):
    """Load a template from the checked-in text assets.

    Parameters
    ----------
    kind : TemplateKind | str
        The template to load.

    Returns
    -------
    template : PromptTemplate
    """
    kind = TemplateKind(kind)
    return PromptTemplate(kind, _read_asset(kind.value))


#: The templates, keyed by kind.
TEMPLATES = {kind: load_template(kind) for kind in TemplateKind}

#: Example bindings shown to the model.
FEWSHOT = {
    "graph_planning_example": _read_asset("graph_planning_example").rstrip("\n"),
    "query_example": _read_asset("query_example").rstrip("\n"),
    "query_example_plan": _read_asset("query_example_plan").rstrip("\n"),
}


def render_prompt(template, bindings):
    """Substitute the placeholders of a template.

    Each placeholder is replaced in a single pass, so bound values are never
    scanned for placeholders themselves. Nothing else in the body changes.

    Parameters
    ----------
    template : PromptTemplate
        The template.
    bindings : dict
        Maps placeholder name to its text. Extra keys are ignored.

    Returns
    -------
    prompt : str

    Raises
    ------
    MissingBindingError
        If a placeholder of the template has no binding.

    Examples
    --------
    >>> template = PromptTemplate(TemplateKind.QUERY_PLANNING, "Input: {task}")
    >>> render_prompt(template, {"task": "{x}"})
    'Input: {x}'
    """
    for name in template.placeholders:
        if name not in bindings:
            raise MissingBindingError(name)
    return _PLACEHOLDER_RE.sub(
        lambda match: str(bindings[match.group(1)]), template.body
    )


def task_binding(graph):
    """The ``task`` binding of a task graph: its pretty-printed JSON."""
    return graph.to_json(indent=4)


def build_prompt(kind, task):
    """Render a template with the example bindings and ``task``.

    Parameters
    ----------
    kind : TemplateKind | str
        The template.
    task : str | TaskGraph
        Text bound to ``{task}``; task graphs are bound as their JSON.

    Returns
    -------
    prompt : str
    """
    if not isinstance(task, str):
        task = task_binding(task)
    return render_prompt(TEMPLATES[TemplateKind(kind)], {**FEWSHOT, "task": task})


def planning_prompt(graph):
    """The graph-planning prompt of a task graph."""
    return build_prompt(TemplateKind.GRAPH_PLANNING, graph)
