"""Exception taxonomy.

Three broad families matter to callers: configuration problems
(:class:`ConfigError`), bad or inconsistent input data (:class:`DataError`
and subclasses), and numerical failures during fitting
(:class:`NumericalError` and subclasses).  The CLI maps these onto exit
codes 1, 2 and 3 respectively.
"""

from __future__ import annotations


class PatronageError(Exception):
    """Base class for all library errors."""


class ConfigError(PatronageError):
    """Invalid configuration value."""


class DataError(PatronageError):
    """Invalid, inconsistent, or missing input data."""


class ParseError(DataError):
    def __init__(self, file: str, line: int, column: str, reason: str):
        self.file = file
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"{file}:{line}: column '{column}': {reason}")


class IntegrityError(DataError):
    def __init__(self, kind: str, offender, detail: str = ""):
        self.kind = kind
        self.offender = offender
        msg = f"integrity violation ({kind}): {offender!r}"
        if detail:
            msg += f" - {detail}"
        super().__init__(msg)


class DuplicateId(DataError):
    pass


class NoSpells(DataError):
    pass


class UnknownNode(DataError):
    pass


class MissingRank(DataError):
    pass


class MissingProvince(DataError):
    pass


class MissingClique(DataError):
    pass


class MissingGender(DataError):
    pass


class NoNeighbors(PatronageError):
    pass


class LengthMismatch(PatronageError):
    pass


class NotAdjacent(PatronageError):
    pass


class EmptyCorpus(PatronageError):
    pass


class EmptyGraph(PatronageError):
    pass


class FewerThanThreeRanks(PatronageError):
    pass


class ColumnMismatch(PatronageError):
    pass


class TooFewRows(PatronageError):
    pass


class DegenerateSample(PatronageError):
    pass


class NumericalError(PatronageError):
    """Fitting failed for numerical reasons."""


class RankDeficient(NumericalError):
    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(f"design matrix is rank deficient; suspect columns: {', '.join(self.columns)}")


class Separation(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass
