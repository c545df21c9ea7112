"""Exception types shared across the package.

The CLI maps these onto process exit codes: invalid input -> 2,
I/O problems -> 3, numerical failures -> 4.
"""


class ScatfieldError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ScatfieldError, ValueError):
    """An argument violates an operation's precondition."""


class NumericalFailureError(ScatfieldError, ArithmeticError):
    """A numerical procedure failed to converge or lost rank."""


class UndefinedMetricError(InvalidArgumentError):
    """A metric is undefined for the given inputs (e.g. all-zero reference)."""


class EmptyRegionError(ScatfieldError):
    """No surface points inside a scattering region query."""


class InvalidSceneError(InvalidArgumentError):
    """A scene description violates the scene schema or geometry constraints."""


class TrainingDivergedError(NumericalFailureError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")
