from .report import (
    FAILURE_PENALTY,
    GROUP_KEYS,
    CaseRecord,
    ReportTable,
    RunReport,
    aggregate_by,
    format_report,
    format_value,
    score_run,
)
from .stats import (
    correlation_stats,
    correlation_table,
    parallel_sequential_ratio,
)
