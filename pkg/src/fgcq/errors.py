"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class FgcqError(Exception):
    """Base class for all toolkit errors."""


class QueryParseError(FgcqError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class NotAcyclic(FgcqError):
    pass


class IsAcyclic(FgcqError):
    pass


class NotFreeConnex(FgcqError):
    pass


class InvalidTree(FgcqError):
    pass


class OrderMismatch(FgcqError):
    pass


class DisruptiveTrioPresent(FgcqError):
    def __init__(self, trio):
        self.trio = trio
        super().__init__(f"disruptive trio {tuple(trio)} under the requested order")


class OutOfRange(FgcqError, IndexError):
    pass


class PrefixMismatch(FgcqError):
    pass


class NoCoveringAtom(FgcqError):
    pass


class UnknownValue(FgcqError, KeyError):
    pass


class DataError(FgcqError):
    """Malformed or missing input data (CSV files, weights, arities)."""


class MissingWeight(FgcqError):
    pass


class DimensionMismatch(FgcqError):
    pass


class SelfLoop(FgcqError):
    pass


class UnsupportedK(FgcqError):
    pass


class NotCyclic(FgcqError):
    pass


class NonBinaryAtom(FgcqError):
    pass


class UniformityMismatch(FgcqError):
    pass


class DivisibilityViolation(FgcqError):
    pass


class NoDisjointPair(FgcqError):
    pass


class InvalidEmbedding(FgcqError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(str(p) for p in self.problems))


class InstanceTooLarge(FgcqError):
    pass


class InvalidInstance(FgcqError):
    pass
