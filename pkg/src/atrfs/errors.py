"""Exception hierarchy shared by all modules."""


class ATRFSError(Exception):
    """Base class for every error raised by this package."""


class ArffParseError(ATRFSError, ValueError):
    """Malformed ARFF content. Carries the 1-based line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ConfigurationError(ATRFSError, ValueError):
    """Invalid user configuration (unknown label name, bad config key, ...)."""


class DataError(ATRFSError, ValueError):
    """Data content violates a domain invariant."""


class StateError(ATRFSError, RuntimeError):
    """An operation was called on an object in the wrong state."""


class EmptyAfterPruningError(ATRFSError, ValueError):
    """Pruned problem transformation removed every instance."""


class UndefinedMetricError(ATRFSError, ValueError):
    """A metric has no eligible instance to average over."""


class InternalConsistencyError(ATRFSError, ArithmeticError):
    """A numerical identity was violated beyond floating-point tolerance."""


class RankingTimeout(ATRFSError):
    """Greedy ranking exceeded its wall-clock budget."""

    def __init__(self, elapsed, budget):
        self.elapsed = elapsed
        self.budget = budget
        super().__init__(f"ranking exceeded budget: {elapsed:.3f}s > {budget:.3f}s")
