"""Exception hierarchy shared by all modules."""


class SpliceCheckError(Exception):
    """Base class for every error raised by splicecheck."""


class UnknownVertexError(SpliceCheckError, KeyError):
    def __init__(self, vertex):
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self):
        return f"unknown vertex {self.vertex!r}"


class GraphFormatError(SpliceCheckError, ValueError):
    """Malformed graph or enumeration data."""


class InfiniteMultiplicityError(SpliceCheckError, ValueError):
    """An ω multiplicity was requested where only finite values make sense."""

    def __init__(self, src, dst):
        super().__init__(f"edge multiplicity {src!r} -> {dst!r} is infinite")
        self.src = src
        self.dst = dst


class SizeBoundError(SpliceCheckError):
    """A brute-force enumeration would exceed the configured size guard."""


class PreconditionError(SpliceCheckError):
    """An operation was called outside of its domain.

    ``criterion`` names the condition that failed, e.g. ``"condition_k"``.
    """

    def __init__(self, message, criterion=None):
        super().__init__(message)
        self.criterion = criterion


class ScopeError(PreconditionError):
    """Input lies outside what the filtered computations support (singular vertices)."""


class StructureError(SpliceCheckError):
    """An order-theoretic structure is not what it must be (e.g. joins missing)."""


class WellDefinednessError(SpliceCheckError):
    """A linear map does not descend to the requested quotient or subgroup."""


class InconsistencyError(SpliceCheckError):
    """An internal verification failed; this indicates a bug, not bad input."""
