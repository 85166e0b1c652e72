from importlib import import_module


def _check_pandas_installed(strict=True):
    """Aux function."""
    return _soft_import(
        "pandas", "converting report tables to dataframes", strict=strict
    )


def requires_pandas(func):
    """Skip testing if pandas is not installed."""
    import pytest

    has_pandas = _check_pandas_installed(strict=False) is not False
    return pytest.mark.skipif(not has_pandas, reason="Requires pandas")(func)


def _soft_import(name, purpose, strict=True):
    """Import soft dependencies, providing informative errors on failure.

    Parameters
    ----------
    name : str
        Name of the module to be imported. For example, 'pandas'.
    purpose : str
        A very brief statement (formulated as a noun phrase) explaining what
        functionality the package provides to plangraph.
    strict : bool
        Whether to raise an error if module import fails.
    """

    # so that error msg lines are aligned
    def indent(x):
        return x.rjust(len(x) + 14)

    try:
        mod = import_module(name)
        return mod
    except (ImportError, ModuleNotFoundError):
        if strict:
            raise RuntimeError(
                f"For {purpose} to work, the {name} module is needed, "
                + "but it could not be imported.\n"
                + "\n".join(
                    (
                        indent(
                            "use the following installation method "
                            "appropriate for your environment:"
                        ),
                        indent(f"'pip install {name}'"),
                        indent(f"'conda install -c conda-forge {name}'"),
                    )
                )
            )
        else:
            return False


def _check_option(parameter, value, allowed_values):
    """Check that ``value`` is one of ``allowed_values``.

    Parameters
    ----------
    parameter : str
        Name of the parameter, used in the error message.
    value : object
        The value to check.
    allowed_values : iterable
        The accepted values.

    Returns
    -------
    value : object
        ``value`` unchanged, so the call can be used inline.
    """
    allowed_values = list(allowed_values)
    if value not in allowed_values:
        options = ", ".join(repr(v) for v in allowed_values)
        raise ValueError(
            f"Invalid value for the '{parameter}' parameter. Allowed values are "
            f"{options}, but got {value!r} instead."
        )
    return value


def _check_n_jobs(n_jobs):
    """Resolve ``n_jobs`` to a positive worker count (None means all cores)."""
    import os

    if n_jobs is None:
        return os.cpu_count() or 1
    n_jobs = int(n_jobs)
    if n_jobs < 1:
        raise ValueError(f"n_jobs must be a positive integer, got {n_jobs}")
    return n_jobs
