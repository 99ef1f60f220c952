"""Exception hierarchy shared by every module."""


class MicropolarError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(MicropolarError, ValueError):
    """Inconsistent grids, shapes, schedules or config files."""


class DomainError(MicropolarError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvariantError(MicropolarError):
    """A structural invariant of a field or state was violated."""


class NumericalFailure(MicropolarError, RuntimeError):
    """An iterative numerical method failed to reach its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class SolverDivergence(MicropolarError, RuntimeError):
    """Non-finite values or runaway energy growth during time stepping."""

    def __init__(self, message, last_valid_time):
        super().__init__(f"{message} (last valid time {last_valid_time:.6g})")
        self.last_valid_time = last_valid_time


class InsufficientDataError(MicropolarError, ValueError):
    """Too few samples, or too short a window, for a fit."""
