class ErgowalkError(Exception):
    """Base class for every error raised by ergowalk."""


class ConfigError(ErgowalkError, ValueError):
    """Invalid configuration or parameter value."""


class PeriodRangeError(ConfigError):
    pass


class ProfileClampError(ConfigError):
    """Transition probabilities leave the clamp interval [1e-4, 1 - 1e-4]."""

    def __init__(self, p_min, p_max):
        self.p_min = p_min
        self.p_max = p_max
        super().__init__(
            f"profile leaves the clamp domain: min p = {p_min:.6g}, max p = {p_max:.6g}"
        )


class MissingHolderDataError(ConfigError):
    pass


class UnsupportedStructureError(ErgowalkError, TypeError):
    """The requested structure does not exist for this system kind."""


class PointKindError(ErgowalkError, TypeError):
    pass


class GridAlignmentError(ErgowalkError, ValueError):
    pass


class ReductionError(ErgowalkError, RuntimeError):
    pass


class LoopClosureError(ErgowalkError, RuntimeError):
    pass


class LoopNotClosedError(ErgowalkError, ValueError):
    pass


class NotACoboundaryError(ErgowalkError, ValueError):
    pass


class ObstructionLeakError(ErgowalkError, RuntimeError):
    pass


class PreconditionError(ErgowalkError, ValueError):
    pass


class ScenarioFailure(ErgowalkError, RuntimeError):
    """A scenario stopped at runtime; ``manifest`` records its partial outputs."""

    def __init__(self, message, manifest=None):
        super().__init__(message)
        self.manifest = manifest
