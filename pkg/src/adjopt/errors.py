"""Exception hierarchy.

Usage-type errors (bad input shape, overlapping node sets) derive from
:class:`UsageError`; everything that reflects a property of the graph or
model derives from :class:`DomainError`. The CLI maps the two families to
distinct exit codes.
"""


class AdjoptError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(AdjoptError, ValueError):
    """The call itself is malformed."""


class DomainError(AdjoptError):
    """The inputs are well-formed but violate a graphical or model condition."""


class GraphSyntaxError(UsageError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphStructureError(UsageError):
    """Duplicate edge, self-loop, conflicting declarations or a directed cycle."""


class UnknownNodeError(UsageError, KeyError):
    def __init__(self, nodes):
        self.nodes = tuple(nodes)
        super().__init__(f"unknown node(s): {', '.join(self.nodes)}")

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return self.args[0]


class OverlapError(UsageError):
    """Node sets that must be pairwise disjoint share members."""


class NotMaximalError(DomainError):
    """The graph contains a forbidden induced subgraph of a maximal PDAG."""


class OrientationConflictError(DomainError):
    def __init__(self, message: str, edge: tuple[str, str] | None = None):
        self.edge = edge
        super().__init__(message)


class ExtensionLimitError(DomainError):
    """Too many undirected edges to enumerate the represented DAGs."""


class NotAmenableError(DomainError):
    """Some proper possibly causal path leaves X through an undirected edge."""


class NotPossibleDescendantError(DomainError):
    """Some outcome is not a possible descendant of the treatment set."""


class InvalidAdjustmentSetError(DomainError):
    def __init__(self, message: str, decision=None):
        self.decision = decision
        super().__init__(message)


class NoValidAdjustmentSetError(DomainError):
    """No covariate set satisfies the adjustment criterion."""


class RankDeficientError(DomainError):
    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(f"design matrix is rank deficient; collinear column(s): {', '.join(self.columns)}")
