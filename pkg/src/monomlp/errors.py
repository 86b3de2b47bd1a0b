"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand dimensions do not match."""


class ConstraintError(ValueError):
    """A parameter violates a structural constraint (e.g. negative alpha)."""


class InconsistencyError(ValueError):
    """A point set admits no monotone interpolant."""


class ConvergenceError(RuntimeError):
    """The sharpness schedule was exhausted before reaching the target residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ModelFormatError(ValueError):
    """A model document is malformed."""


class ModelVersionError(ModelFormatError):
    """A model document declares an unsupported version."""


class DataError(ValueError):
    """A dataset file is missing, malformed, or inconsistent with its spec."""


class TrainingAbort(RuntimeError):
    """Training hit a non-finite loss and stopped."""
