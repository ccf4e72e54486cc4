"""Exceptions shared across the package."""


class AlgPhaseError(Exception):
    """Base class for all algphase-specific failures."""


class DimensionMismatch(AlgPhaseError, ValueError):
    """Signal, ensemble, or observation shapes/modes do not match."""


class NonGenericMeasurement(AlgPhaseError, RuntimeError):
    """A measurement value is too close to zero to normalize against.

    Raised when some |b_i| falls below the relative floor, which happens for
    signals lying (numerically) on a measurement kernel.
    """


class NonGenericSignal(AlgPhaseError, RuntimeError):
    """A closed-form solver's pivot entry is (numerically) zero."""


class NotIdentifiable(AlgPhaseError, RuntimeError):
    """The degree sweep never isolated a one-dimensional complement.

    Typically the system is below the identifiability threshold and the
    solution variety has several points or positive dimension.
    """


class IllConditioned(AlgPhaseError, RuntimeError):
    """Numerical rank decisions were too ambiguous to trust.

    Carries the partial recovery report (when available) as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
