"""Exception types shared across the package."""


class EvsvmError(Exception):
    """Base class for all package errors."""


class FrameMismatchError(EvsvmError, ValueError):
    """Operands live on different frames of discernment."""


class TotalConflictError(EvsvmError, ArithmeticError):
    """Sources are fully contradictory; Dempster normalization is undefined."""

    def __init__(self, conflict):
        super().__init__(f"total conflict between sources (m(empty) = {conflict!r})")
        self.conflict = conflict


class DegenerateMassError(EvsvmError, ArithmeticError):
    """Mass function is unusable for the requested transform (e.g. m(empty) = 1)."""


class ConvergenceError(EvsvmError, ArithmeticError):
    """The SMO solver hit its iteration cap.

    ``model`` holds the best iterate so callers may still use it.
    """

    def __init__(self, message, model=None, gap=None):
        super().__init__(message)
        self.model = model
        self.gap = gap


class DataError(EvsvmError, ValueError):
    """Malformed input data (CSV, PGM, synthetic spec)."""


class ModelFormatError(DataError):
    """A saved model file is truncated, corrupted or of the wrong version."""
