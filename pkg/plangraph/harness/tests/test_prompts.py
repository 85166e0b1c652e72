import pytest

from plangraph.core import read_task_graph
from plangraph.errors import MissingBindingError
from plangraph.harness import (
    FEWSHOT,
    PLACEHOLDERS,
    TEMPLATES,
    PromptTemplate,
    TemplateKind,
    build_prompt,
    load_template,
    planning_prompt,
    render_prompt,
    task_binding,
)
from plangraph.harness.prompts import TEMPLATE_DIR
from plangraph.utils import _get_test_fname

graph = read_task_graph(_get_test_fname("example_graph.json"))


@pytest.mark.parametrize("kind", list(TemplateKind))
def test_templates_match_assets(kind):
    """Test that the templates are the checked-in text, unchanged."""
    body = (TEMPLATE_DIR / f"{kind}.txt").read_text(encoding="utf-8")
    assert TEMPLATES[kind].body == body
    assert load_template(str(kind)) == TEMPLATES[kind]
    assert "task" in TEMPLATES[kind].placeholders
    assert set(TEMPLATES[kind].placeholders) <= set(PLACEHOLDERS)
    assert repr(TEMPLATES[kind]).startswith(f"<PromptTemplate | {kind}")


def test_placeholders():
    """Test which examples each template shows."""
    assert TEMPLATES[TemplateKind.GRAPH_PLANNING].placeholders == (
        "graph_planning_example",
        "task",
    )
    assert set(TEMPLATES[TemplateKind.EXTRACT_GRAPH].placeholders) == {
        "query_example",
        "query_example_plan",
        "task",
    }


def test_render_prompt():
    """Test substitution leaves everything else alone."""
    text = "A {task} B {task} {other} {"
    template = PromptTemplate(TemplateKind.QUERY_PLANNING, text)
    assert render_prompt(template, {"task": "x", "unused": 1}) == "A x B x {other} {"
    # bound values are not scanned again
    assert render_prompt(template, {"task": "{task}"}) == "A {task} B {task} {other} {"
    with pytest.raises(MissingBindingError, match="task") as err:
        render_prompt(template, {})
    assert err.value.placeholder == "task"
    assert template.render(task="y") == "A y B y {other} {"


def test_planning_prompt():
    """Test the task JSON is embedded verbatim."""
    prompt = planning_prompt(graph)
    assert task_binding(graph) in prompt
    assert FEWSHOT["graph_planning_example"] in prompt
    assert "{task}" not in prompt
    assert "{graph_planning_example}" not in prompt
    before, after = TEMPLATES[TemplateKind.GRAPH_PLANNING].body.split(
        "{graph_planning_example}"
    )
    assert prompt.startswith(before)
    assert prompt.endswith(after.split("{task}")[1])
    assert build_prompt("graph_planning", task_binding(graph)) == prompt
    story = "N1 becomes N2 in 3 minutes."
    query = build_prompt(TemplateKind.QUERY_PLANNING, story)
    assert story in query
    assert FEWSHOT["query_example"] in query
