"""Parallel efficiency and correlation statistics."""

from fractions import Fraction

import numpy as np

from ..core import simulate
from ..errors import DegenerateInputError, EmptyPlanError

CORRELATION_METRICS = (
    "Success Rate",
    "Optimal Rate",
    "Avg Time Ratio",
    "Avg Cost Ratio",
)


def parallel_sequential_ratio(graph, plan):
    """Makespan of a plan over the sum of its sub-plans' durations.

    Parameters
    ----------
    graph : TaskGraph
        The task graph.
    plan : Plan
        A valid plan.

    Returns
    -------
    ratio : Fraction
        In ``(0, 1]``; 1 when nothing runs in parallel.

    Raises
    ------
    EmptyPlanError
        If the plan has no sub-plans.
    """
    if not len(plan):
        raise EmptyPlanError(
            "The parallel/sequential ratio of an empty plan is undefined"
        )
    schedule = simulate(graph, plan)
    return Fraction(schedule.makespan, schedule.sequential_time)


def _normalise(values, name):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DegenerateInputError(f"{name} needs at least 2 points, got {values.size}")
    span = np.ptp(values)
    if span == 0:
        raise DegenerateInputError(f"{name} is constant")
    return (values - values.min()) / span


def correlation_stats(xs, ys):
    """Pearson coefficient and regression slope of min-max normalised series.

    Both series are scaled to ``[0, 1]`` independently, then the Pearson
    coefficient and the least-squares slope are computed and rounded to 2
    decimals.

    Parameters
    ----------
    xs, ys : sequence of float
        Paired observations.

    Returns
    -------
    r : float
        Pearson coefficient.
    m : float
        Slope of ``y`` on ``x``.

    Raises
    ------
    DegenerateInputError
        With fewer than 2 points or a constant series.

    Examples
    --------
    >>> correlation_stats([1, 2, 3], [2, 4, 6])
    (1.0, 1.0)
    >>> correlation_stats([1, 2, 3], [6, 4, 2])
    (-1.0, -1.0)
    """
    if len(xs) != len(ys):
        raise ValueError(f"xs and ys differ in length ({len(xs)} != {len(ys)})")
    x = _normalise(xs, "xs")
    y = _normalise(ys, "ys")
    r = np.corrcoef(x, y)[0, 1]
    slope = np.polyfit(x, y, 1)[0]
    return round(float(r), 2) + 0.0, round(float(slope), 2) + 0.0


def correlation_table(table, x="node_count", metrics=CORRELATION_METRICS):
    """Correlate report metrics with a group key.

    Parameters
    ----------
    table : ReportTable
        Grouped by a numeric key (e.g. node count or edge count).
    x : str
        The key column to correlate against.
    metrics : tuple of str
        Report columns to correlate.

    Returns
    -------
    stats : dict
        Maps each metric to ``(r, m)``, or None when undefined (e.g. a
        constant metric).
    """
    xs = [float(row[x]) for row in table]
    out = {}
    for metric in metrics:
        ys = [float(row[metric]) for row in table]
        try:
            out[metric] = correlation_stats(xs, ys)
        except DegenerateInputError:
            out[metric] = None
    return out
