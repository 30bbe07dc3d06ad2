"""Exception types shared across the toolkit."""


class CombsyncError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(CombsyncError, ValueError):
    """An argument is outside its documented domain."""


class InsufficientData(CombsyncError, ValueError):
    """A series is too short for the requested estimator."""


class DegenerateInput(CombsyncError, ValueError):
    """Structurally valid input that cannot be processed (e.g. zeros where logs are needed)."""
