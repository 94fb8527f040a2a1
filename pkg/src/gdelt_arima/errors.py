"""Exception hierarchy shared by the pipeline stages."""


class GdeltArimaError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class IngestError(GdeltArimaError):
    """Reading the event source failed; ``stats`` holds the counts so far."""

    def __init__(self, message, stats):
        super().__init__(message)
        self.stats = stats


class DyadError(GdeltArimaError, ValueError):
    """A record handed to aggregation does not pair the target with one partner."""


class UndefinedYearError(GdeltArimaError, ValueError):
    """Connection strength requested for a year with no dyad records."""


class OptimizerError(GdeltArimaError, ValueError):
    pass


class FitError(GdeltArimaError, ValueError):
    pass


class InsufficientDataError(FitError):
    pass


class SelectionError(FitError):
    pass


class SplitError(GdeltArimaError, ValueError):
    pass


class MapeUndefinedError(GdeltArimaError, ZeroDivisionError):
    """An actual value of zero makes the percentage error undefined."""
