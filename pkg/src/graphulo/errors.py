"""Exception types shared across the package."""


class GraphuloError(Exception):
    pass


class UnknownLabel(GraphuloError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DimensionMismatch(GraphuloError, ValueError):
    pass


class NotSquare(DimensionMismatch):
    pass


class MalformedIncidence(GraphuloError, ValueError):
    pass


class SelfLoopUnsupported(GraphuloError, ValueError):
    pass


class DuplicateRow(GraphuloError, ValueError):
    pass


class NotSymmetric(GraphuloError, ValueError):
    pass


class SelfLoopPresent(GraphuloError, ValueError):
    pass


class NonBinaryWeight(GraphuloError, ValueError):
    pass


class NonConvergence(GraphuloError, ArithmeticError):
    pass


class RankDeficiency(GraphuloError, ArithmeticError):
    pass


class Divergence(GraphuloError, ArithmeticError):
    pass


class NameCollision(GraphuloError, ValueError):
    pass


class NotFound(GraphuloError, LookupError):
    pass


class IoFailure(GraphuloError, OSError):
    pass


class ParseError(GraphuloError, ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
