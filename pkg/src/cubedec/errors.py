"""Exception hierarchy shared by every module of the package."""


class DECError(Exception):
    """Base class for all errors raised by cubedec."""


class DegenerateSimplex(DECError):
    pass


class NotIndependent(DECError):
    pass


class InvalidDimension(DECError):
    pass


class NeedsEmbedding(DECError):
    pass


class NotManifold(DECError):
    pass


class DimensionError(DECError):
    pass


class NoDual(DECError):
    pass


class TooSmall(DECError):
    pass


class Unsupported(DECError):
    pass


class RankDecisionError(DECError):
    """Kernel rank could not be separated from the rest of the spectrum."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class SolverError(DECError):
    """Iterative solve did not reach its residual target."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ParseError(DECError):
    """Malformed text input; carries the 1-based line and column."""

    def __init__(self, message, line=0, column=0, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source or '<input>'}:{line}:{column}"
        super().__init__(f"{where}: {message}")
