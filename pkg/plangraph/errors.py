"""Exceptions raised by plangraph."""


class PlanGraphError(Exception):
    """Base class for all plangraph errors."""


class InvariantViolationError(PlanGraphError, ValueError):
    """A task graph or configuration breaks one of its invariants.

    Parameters
    ----------
    invariant : str
        Short name of the violated invariant, e.g. ``"acyclicity"``.
    message : str
        Human readable description.
    """

    def __init__(self, invariant, message):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class MalformedPlanError(PlanGraphError, ValueError):
    """A plan breaks its structural invariants."""


class UnmatchedRuleError(PlanGraphError, ValueError):
    """A sub-plan does not correspond to any rule of the task graph."""

    def __init__(self, name, message):
        self.name = name
        super().__init__(message)


class InfeasibleEdgeCountError(PlanGraphError, ValueError):
    """The requested edge count cannot be realised for the node count."""


class DegenerateGraphError(PlanGraphError, RuntimeError):
    """Graph generation could not produce a usable task graph."""


class UnreachableTargetError(PlanGraphError, ValueError):
    """The query target cannot be achieved from the initial sources."""


class TooLargeError(PlanGraphError, ValueError):
    """The instance exceeds the size guard of an exhaustive routine."""


class EmptyRunError(PlanGraphError, ValueError):
    """A run with zero cases cannot be scored."""


class EmptyPlanError(PlanGraphError, ValueError):
    """The operation is undefined for a plan without sub-plans."""


class DegenerateInputError(PlanGraphError, ValueError):
    """A statistic is undefined for the given (e.g. constant) input."""


class MissingBindingError(PlanGraphError, ValueError):
    """A prompt placeholder has no binding."""

    def __init__(self, placeholder):
        self.placeholder = placeholder
        super().__init__(f"No binding for placeholder {{{placeholder}}}")


class NoJsonFoundError(PlanGraphError, ValueError):
    """A model response does not contain the expected JSON value."""


class SchemaMismatchError(PlanGraphError, ValueError):
    """Decoded JSON does not follow the expected schema.

    Parameters
    ----------
    message : str
        Description of the mismatch.
    index : int | None
        Position of the offending element in the decoded array, if any.
    field : str | None
        Dotted path of the offending field, if known.
    """

    def __init__(self, message, index=None, field=None):
        self.index = index
        self.field = field
        super().__init__(message)


class EndpointError(PlanGraphError, RuntimeError):
    """The chat-completion endpoint failed after all retries."""


class AllRoundsFailedError(PlanGraphError, RuntimeError):
    """Query generation never produced a story that matches its graph.

    Parameters
    ----------
    best : str | None
        The story with the highest similarity, if any story was produced.
    similarity : float | None
        Similarity of ``best`` to the source graph.
    rounds : list of dict
        The audit trail of every round.
    """

    def __init__(self, best, similarity, rounds):
        self.best = best
        self.similarity = similarity
        self.rounds = rounds
        super().__init__(
            f"No exact match after {len(rounds)} round(s); "
            f"best similarity {similarity}"
        )
