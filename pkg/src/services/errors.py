from src.conf import messages


class ScoringError(Exception):
    """Base class for every data, numerical and model error of the library."""


class InvalidDatasetError(ScoringError):
    pass


class MalformedInputError(ScoringError):
    """A CSV cell or header could not be parsed.

    :param message: Human readable description.
    :type message: str
    :param row: 1-based data row of the offending cell, if any.
    :type row: int, optional
    :param column: Column name of the offending cell, if any.
    :type column: str, optional
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class StratificationError(ScoringError):
    pass


class SingleClassError(ScoringError):
    def __init__(self, message: str = messages.SINGLE_CLASS):
        super().__init__(message)


class MissingValueError(ScoringError):
    pass


class MissingCovariateError(ScoringError):
    pass


class LinkSupportError(ScoringError):
    def __init__(self, message: str = messages.OUTSIDE_SUPPORT):
        super().__init__(message)


class BasisError(ScoringError):
    pass


class RankDeficiencyError(ScoringError):
    pass


class ConvergenceError(ScoringError):
    """Fitting stopped without meeting the convergence test.

    :param message: Human readable description.
    :type message: str
    :param diagnostics: Iteration count, last deviances and step information.
    :type diagnostics: dict, optional
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NotConvergedError(ScoringError):
    def __init__(self, message: str = messages.MODEL_NOT_CONVERGED):
        super().__init__(message)


class SpecMismatchError(ScoringError):
    def __init__(self, message: str = messages.SPEC_MISMATCH):
        super().__init__(message)


class UnknownTermError(ScoringError):
    pass
