"""Exception types raised by the library."""


class PrequentialError(Exception):
    """Base class for all library errors."""


class InvalidModelError(PrequentialError, ValueError):
    """A model or predictive has a non-positive or non-finite variance."""


class NonstationaryModelError(InvalidModelError):
    """An operation needing the stationary distribution got |phi| >= 1."""


class SeriesTooShortError(PrequentialError, ValueError):
    """Scoring needs at least two observations."""


class ContaminationIndexError(PrequentialError, IndexError):
    """A 1-based contamination index falls outside the series."""


class DegenerateInputError(PrequentialError, ValueError):
    """An affine fit was requested on inputs with no spread."""


class EmptyResultsError(PrequentialError, ValueError):
    """An operation needs at least one replication result."""


class ConfigError(PrequentialError, ValueError):
    """An experiment configuration is malformed.

    ``key`` names the offending entry when there is one.
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class ReplicationError(PrequentialError):
    """Wraps a failure inside one Monte Carlo replication."""

    def __init__(self, rep_id: int, cause: Exception):
        super().__init__(f"replication {rep_id} failed: {cause}")
        self.rep_id = rep_id
        self.cause = cause
