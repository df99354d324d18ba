"""Exception types raised by qclone."""


class QCloneError(ValueError):
    """Base class for all qclone errors."""


class DimensionError(QCloneError):
    """Matrix or vector has the wrong shape for the requested operation."""


class NotHermitianError(QCloneError):
    pass


class NotNormalizedError(QCloneError):
    pass


class NotUnitaryError(QCloneError):
    pass


class ConstraintError(QCloneError):
    """A parameter violates a physical constraint (norm bound, range, ...)."""
