"""Exception types raised by the pscopf library."""


class PscopfError(Exception):
    """Base class for all library errors."""


class CaseParseError(PscopfError):
    """Malformed case or sample file. Carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class CaseValidationError(PscopfError):
    """Case data violates a model invariant (slack count, reactances, ...)."""


class DimensionError(PscopfError):
    """Array shapes do not agree with the network dimensions."""


class InsufficientDataError(PscopfError):
    """Too few samples for the requested statistic."""


class NotPsdError(PscopfError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class IslandingError(PscopfError):
    """An outage disconnects the network."""

    def __init__(self, message, island=None):
        super().__init__(message)
        self.island = island


class NoBalancingCapacityError(PscopfError):
    """No in-service generator with positive capacity remains."""


class DomainError(PscopfError):
    """Scalar parameter outside its admissible range."""


class SolverFailureError(PscopfError):
    """The LP solver failed to converge or hit an internal limit."""
