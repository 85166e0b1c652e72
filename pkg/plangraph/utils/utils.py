import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

from tqdm import tqdm

from .check import _check_n_jobs, _check_pandas_installed

logger = logging.getLogger("plangraph")


def set_log_level(verbose=None):
    """Set the logging level of the plangraph logger.

    Parameters
    ----------
    verbose : bool | str | int | None
        ``True`` is DEBUG, ``False`` or ``None`` is WARNING. Strings such as
        ``"INFO"`` and integer levels are passed to :mod:`logging` as is.
    """
    if verbose is None or verbose is False:
        level = logging.WARNING
    elif verbose is True:
        level = logging.DEBUG
    elif isinstance(verbose, str):
        level = logging.getLevelName(verbose.upper())
        if not isinstance(level, int):
            raise ValueError(f"Unknown logging level {verbose!r}")
    else:
        level = int(verbose)
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()  # stderr
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
    return level


def _get_test_fname(name):
    """Get the path of a fixture file shipped with the test-suite."""
    path = Path(__file__).parent.parent / "tests" / "data" / name
    assert path.exists(), path
    return path


def _dumps(obj, indent=None):
    """Serialise to JSON deterministically (insertion-ordered keys)."""
    return json.dumps(obj, indent=indent, ensure_ascii=False)


@contextmanager
def _atomic_write(fname, mode="w"):
    """Write to a temporary file next to ``fname``, then rename it in place."""
    fname = Path(fname)
    fname.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(
        dir=fname.parent, prefix=f".{fname.name}.", suffix=".tmp"
    )
    try:
        kwargs = {} if "b" in mode else {"encoding": "utf-8", "newline": "\n"}
        with os.fdopen(fd, mode, **kwargs) as fid:
            yield fid
        os.replace(tmp, fname)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_json(fname, obj, indent=4):
    """Atomically write ``obj`` as a JSON document."""
    with _atomic_write(fname) as fid:
        fid.write(_dumps(obj, indent=indent))
        fid.write("\n")
    logger.info("Wrote %s", fname)


def read_json(fname):
    """Read a JSON document."""
    with open(fname, encoding="utf-8") as fid:
        return json.load(fid)


def write_jsonl(fname, records):
    """Atomically write an iterable of JSON-serialisable records, one per line.

    Returns
    -------
    n : int
        Number of records written.
    """
    n = 0
    with _atomic_write(fname) as fid:
        for record in records:
            fid.write(_dumps(record))
            fid.write("\n")
            n += 1
    logger.info("Wrote %d records to %s", n, fname)
    return n


def read_jsonl(fname):
    """Read a JSONL file into a list of records (blank lines are skipped)."""
    with open(fname, encoding="utf-8") as fid:
        return [json.loads(line) for line in fid if line.strip()]


def _parallel_map(func, items, n_jobs=1, desc=None, executor="process"):
    """Apply ``func`` to every item, preserving input order in the output.

    Parameters
    ----------
    func : callable
        A picklable function of one argument when ``executor="process"``.
    items : sequence
        The work items.
    n_jobs : int | None
        Number of workers; 1 runs in the calling process, None uses all cores.
    desc : str | None
        Progress-bar label. No bar is shown when None.
    executor : "process" | "thread"
        Worker pool type.
    """
    n_jobs = _check_n_jobs(n_jobs)
    items = list(items)
    bar = tqdm(total=len(items), desc=desc, disable=desc is None, leave=False)
    if n_jobs == 1 or len(items) <= 1:
        out = []
        for item in items:
            out.append(func(item))
            bar.update()
        bar.close()
        return out
    pool_cls = ProcessPoolExecutor if executor == "process" else ThreadPoolExecutor
    chunksize = max(1, len(items) // (n_jobs * 8)) if executor == "process" else 1
    out = []
    with pool_cls(max_workers=n_jobs) as pool:
        for result in pool.map(func, items, chunksize=chunksize):
            out.append(result)
            bar.update()
    bar.close()
    return out


def file_digest(fname):
    """Return the sha256 hex digest of a file's content."""
    digest = hashlib.sha256()
    with open(fname, "rb") as fid:
        for chunk in iter(lambda: fid.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def to_pandas(table):
    """Convert a report table to a pandas DataFrame.

    Parameters
    ----------
    table : :class:`~plangraph.metrics.ReportTable` | list of dict
        The rows to convert, one dictionary per group.

    Returns
    -------
    df : :class:`pandas.DataFrame`
        One row per group, columns in table order.
    """
    pd = _check_pandas_installed(strict=True)
    columns = list(table[0]) if len(table) else None
    return pd.DataFrame(list(table), columns=columns)
