"""Exception hierarchy for the muskat package."""

from __future__ import annotations


class MuskatError(Exception):
    """Base class for all package errors."""


class ParityError(MuskatError, ValueError):
    pass


class AccuracyError(MuskatError, ValueError):
    pass


class SelfIntersectionError(MuskatError):
    """Two distinct curve samples coincide.

    ``pair`` holds the offending grid indices ``(i, j)`` and ``shift`` the
    period image used for the second point.
    """

    def __init__(self, message: str, pair: tuple[int, int], shift: int = 0):
        super().__init__(message)
        self.pair = pair
        self.shift = shift


class SingularKernelError(SelfIntersectionError):
    """Chord below the kernel guard inside a Birkhoff-Rott evaluation."""


class StripExceededError(MuskatError):
    pass


class InsufficientSpectrumError(MuskatError):
    pass


class IterationError(MuskatError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ConditioningError(MuskatError):
    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class BlowUpError(MuskatError):
    """Raised when a time integration produces non-finite or degenerate data.

    ``state`` is the last finite curve and ``t`` its time.
    """

    def __init__(self, message: str, state=None, t: float = float("nan")):
        super().__init__(message)
        self.state = state
        self.t = t


class SingularityError(MuskatError):
    """Pole proximity of the conformal map."""


class ClearanceError(MuskatError):
    def __init__(self, message: str, point: int, index: int | None = None):
        super().__init__(message)
        self.point = point
        self.index = index


class CostGuardError(MuskatError):
    pass


class FitError(MuskatError):
    pass


class ConfigError(MuskatError, ValueError):
    pass


class SnapshotFormatError(MuskatError, ValueError):
    pass
