"""Run scoring and grouped report tables."""

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import EmptyRunError
from ..evaluator import PlanVerdict, Status
from ..utils.check import _check_option
from ..utils.utils import _atomic_write, logger, to_pandas

#: Ratio assigned to the makespan and cost of a failed plan.
FAILURE_PENALTY = Fraction(4)

GROUP_KEYS = ("node_count", "edge_count", "edge_bucket", "structure", "edge_relation")

RATE_COLUMNS = ("Optimal Rate", "Success Rate", "Feasible Rate")
RATIO_COLUMNS = ("Avg Time Ratio", "Avg Cost Ratio", "Parallel Ratio")
VALUE_COLUMNS = (
    "n",
    *RATE_COLUMNS,
    "Avg Time Ratio",
    "Avg Cost Ratio",
    "Optimal",
    "Feasible",
    "Failed",
    "Parallel Ratio",
)


@dataclass(frozen=True)
class CaseRecord:
    """One scored case: a verdict, the optimum it is measured against and metadata.

    Parameters
    ----------
    verdict : PlanVerdict
        Verdict of the candidate plan.
    opt : tuple of int
        The optimal ``(makespan, cost)``.
    meta : dict
        Instance metadata (node count, structure, edge relation, edge count, seed).
    """

    verdict: PlanVerdict
    opt: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        makespan, cost = self.opt
        object.__setattr__(self, "opt", (int(makespan), int(cost)))

    @property
    def time_ratio(self):
        """Makespan over the optimal makespan (the penalty for failures)."""
        if not self.verdict.succeeded:
            return FAILURE_PENALTY
        return Fraction(self.verdict.makespan, self.opt[0])

    @property
    def cost_ratio(self):
        """Cost over the optimal cost (the penalty for failures)."""
        if not self.verdict.succeeded:
            return FAILURE_PENALTY
        return Fraction(self.verdict.cost, self.opt[1])

    @property
    def parallel_ratio(self):
        """Makespan over the sum of durations, or None for failures."""
        schedule = self.verdict.schedule
        if schedule is None or not schedule.sequential_time:
            return None
        return Fraction(schedule.makespan, schedule.sequential_time)

    def to_dict(self):
        """Serialise to a JSON-compatible dict (one line of verdicts.jsonl)."""
        return {
            "verdict": self.verdict.to_dict(),
            "opt": list(self.opt),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, obj):
        """Decode a record written by :meth:`to_dict`."""
        verdict = PlanVerdict.from_dict(obj["verdict"])
        return cls(verdict, tuple(obj["opt"]), obj.get("meta", {}))


@dataclass(frozen=True)
class RunReport:
    """Aggregate metrics of a run, in exact rational arithmetic.

    Parameters
    ----------
    n : int
        Number of cases.
    n_optimal, n_feasible, n_failed : int
        Status counts.
    avg_time_ratio, avg_cost_ratio : Fraction
        Mean ratios to the optimum, failures counting as the penalty.
    parallel_ratio : Fraction | None
        Mean parallel/sequential ratio over the successful cases.
    """

    n: int
    n_optimal: int
    n_feasible: int
    n_failed: int
    avg_time_ratio: Fraction
    avg_cost_ratio: Fraction
    parallel_ratio: Optional[Fraction] = None

    @property
    def optimal_rate(self):
        """Fraction of optimal plans."""
        return Fraction(self.n_optimal, self.n)

    @property
    def success_rate(self):
        """Fraction of plans reaching the target."""
        return Fraction(self.n_optimal + self.n_feasible, self.n)

    @property
    def feasible_rate(self):
        """Fraction of successful but non-optimal plans."""
        return self.success_rate - self.optimal_rate

    def __repr__(self):
        """Return a summary of the report."""
        row = self.row()
        return (
            f"<RunReport | {self.n} cases> \n"
            f"  Optimal Rate: {row['Optimal Rate']} \n"
            f"  Success Rate: {row['Success Rate']} \n"
            f"  Avg Time Ratio: {row['Avg Time Ratio']} \n"
            f"  Avg Cost Ratio: {row['Avg Cost Ratio']} \n"
        )

    def values(self):
        """Exact column values, keyed by report column name."""
        return {
            "n": self.n,
            "Optimal Rate": self.optimal_rate,
            "Success Rate": self.success_rate,
            "Feasible Rate": self.feasible_rate,
            "Avg Time Ratio": self.avg_time_ratio,
            "Avg Cost Ratio": self.avg_cost_ratio,
            "Optimal": self.n_optimal,
            "Feasible": self.n_feasible,
            "Failed": self.n_failed,
            "Parallel Ratio": self.parallel_ratio,
        }

    def row(self):
        """Column values formatted for display."""
        return {key: format_value(key, val) for key, val in self.values().items()}

    def to_dict(self):
        """JSON summary with rates and ratios as floats."""
        out = {}
        for key, val in self.values().items():
            name = key.lower().replace(" ", "_")
            out[name] = float(val) if isinstance(val, Fraction) else val
        return out


def format_value(column, value):
    """Format a report value: rates in percent with 1 decimal, ratios with 3.

    Examples
    --------
    >>> from fractions import Fraction
    >>> format_value("Optimal Rate", Fraction(392, 1000))
    '39.2'
    >>> format_value("Avg Time Ratio", Fraction(5, 2))
    '2.500'
    """
    if value is None:
        return ""
    if column in RATE_COLUMNS:
        return f"{float(value * 100):.1f}"
    if column in RATIO_COLUMNS:
        return f"{float(value):.3f}"
    return str(value)


def _as_case(item):
    if isinstance(item, CaseRecord):
        return item
    verdict, opt = item[:2]
    meta = item[2] if len(item) > 2 else {}
    return CaseRecord(verdict, opt, meta)


def score_run(cases):
    """Score a run.

    Parameters
    ----------
    cases : iterable of CaseRecord | tuple
        Each case is a :class:`CaseRecord` or a ``(verdict, opt)`` pair.

    Returns
    -------
    report : RunReport

    Raises
    ------
    EmptyRunError
        If there are no cases.
    """
    cases = [_as_case(item) for item in cases]
    if not cases:
        raise EmptyRunError("Cannot score a run without cases")
    n = len(cases)
    status = [case.verdict.status for case in cases]
    parallel = [c.parallel_ratio for c in cases if c.parallel_ratio is not None]
    return RunReport(
        n=n,
        n_optimal=status.count(Status.OPTIMAL),
        n_feasible=status.count(Status.FEASIBLE),
        n_failed=status.count(Status.FAILED),
        avg_time_ratio=sum((case.time_ratio for case in cases), Fraction(0)) / n,
        avg_cost_ratio=sum((case.cost_ratio for case in cases), Fraction(0)) / n,
        parallel_ratio=sum(parallel, Fraction(0)) / len(parallel) if parallel else None,
    )


class ReportTable(list):
    """Rows of grouped metrics, one dict per group, in ascending key order.

    Parameters
    ----------
    rows : list of dict
        Group key columns followed by the exact report values.
    keys : tuple of str
        Names of the group key columns.
    """

    def __init__(self, rows=(), keys=()):
        super().__init__(rows)
        self.keys = tuple(keys)

    def __repr__(self):
        """Return a summary of the table."""
        keys = ", ".join(self.keys) or "nothing"
        return f"<ReportTable | {len(self)} groups by {keys}>"

    @property
    def columns(self):
        """Column names."""
        return list(self.keys) + list(VALUE_COLUMNS)

    def formatted(self):
        """Rows with every value formatted for display."""
        return [
            {key: format_value(key, val) for key, val in row.items()} for row in self
        ]

    def to_csv(self, fname):
        """Write the formatted table to a CSV file (atomically)."""
        with _atomic_write(fname) as fid:
            writer = csv.DictWriter(fid, fieldnames=self.columns, lineterminator="\n")
            writer.writeheader()
            writer.writerows(self.formatted())
        logger.info("Wrote %s", fname)

    def to_pandas(self):
        """Return the formatted table as a :class:`pandas.DataFrame`."""
        return to_pandas(self.formatted())


def _group_value(case, key, bucket_width):
    meta = case.meta
    if key == "edge_bucket":
        return (int(meta["edge_count"]) // bucket_width) * bucket_width
    return meta[key]


def aggregate_by(key, cases, bucket_width=10):
    """Group cases by instance metadata and score every group.

    Parameters
    ----------
    key : str | tuple of str
        One or several of ``"node_count"``, ``"edge_count"``,
        ``"edge_bucket"`` (edge count rounded down to a multiple of
        ``bucket_width``), ``"structure"`` and ``"edge_relation"``.
    cases : iterable of CaseRecord
        The cases, with ``meta`` populated.
    bucket_width : int
        Width of the edge-count buckets.

    Returns
    -------
    table : ReportTable
        One row per group, sorted by group key.
    """
    keys = (key,) if isinstance(key, str) else tuple(key)
    for name in keys:
        _check_option("key", name, GROUP_KEYS)
    groups = {}
    for case in map(_as_case, cases):
        group = tuple(_group_value(case, name, bucket_width) for name in keys)
        groups.setdefault(group, []).append(case)
    rows = []
    for group in sorted(groups):
        row = dict(zip(keys, group))
        row.update(score_run(groups[group]).values())
        rows.append(row)
    return ReportTable(rows, keys)


def format_report(report):
    """Render a report or a report table as aligned text.

    Parameters
    ----------
    report : RunReport | ReportTable
        What to render.

    Returns
    -------
    text : str
    """
    if isinstance(report, RunReport):
        rows, keys = [report.row()], ()
    else:
        rows, keys = report.formatted(), report.keys
    if not rows:
        return ""
    columns = list(keys) + [
        c for c in ("n", *RATE_COLUMNS, *RATIO_COLUMNS) if c in rows[0]
    ]
    widths = {c: max(len(c), *(len(str(row[c])) for row in rows)) for c in columns}
    lines = ["  ".join(c.rjust(widths[c]) for c in columns)]
    for row in rows:
        lines.append("  ".join(str(row[c]).rjust(widths[c]) for c in columns))
    return "\n".join(lines)
