from .endpoint import ChatClient, ModelEndpointConfig
from .parse import extract_json, parse_extracted_graph, parse_plan
from .prompts import (
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
from .query import SELF_CORRECTION_PROMPT, QueryResult, generate_query
from .run import Pipeline, RunResult, run_eval, write_run
from .similarity import DEFAULT_WEIGHTS, graph_similarity, mismatch_report
