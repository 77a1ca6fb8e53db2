"""Exception types raised across the package."""


class NidsBenchError(Exception):
    """Base class for every error raised by nidsbench."""


# ingestion
class MissingColumn(NidsBenchError):
    def __init__(self, name):
        super().__init__(f"missing column: {name!r}")
        self.name = name


class UnparseableCell(NidsBenchError):
    def __init__(self, row, column, value=None):
        super().__init__(f"cannot parse value {value!r} at row {row}, column {column!r}")
        self.row = row
        self.column = column
        self.value = value


class EmptyFile(NidsBenchError):
    pass


class UnexpectedNominalColumn(NidsBenchError):
    def __init__(self, name):
        super().__init__(f"unexpected nominal column: {name!r}")
        self.name = name


# feature reduction
class EmptySelection(NidsBenchError):
    pass


class DimensionMismatch(NidsBenchError):
    pass


class NotSymmetric(NidsBenchError):
    pass


class NoConvergence(NidsBenchError):
    pass


class RankDeficiencyWarning(UserWarning):
    pass


# classifiers
class SingleClassInput(NidsBenchError):
    pass


class NonFiniteFeature(NidsBenchError):
    pass


# metrics
class LengthMismatch(NidsBenchError):
    pass


class UnknownLabel(NidsBenchError):
    pass


# bench
class ConfigError(NidsBenchError):
    pass


class NoReports(NidsBenchError):
    pass


class MixedTaskReports(NidsBenchError):
    pass


class InsufficientCoverage(NidsBenchError):
    pass


class SerializationError(NidsBenchError):
    pass
