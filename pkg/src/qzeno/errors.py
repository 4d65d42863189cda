"""Exception hierarchy shared by the simulator layers."""


class ZenoError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(ZenoError, ValueError):
    """Invalid parameters. ``key`` names the offending setting when known."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class UsageError(ZenoError, ValueError):
    pass


class DomainError(ZenoError, ValueError):
    pass


class ResolutionError(ZenoError):
    """An eigenstate does not fit on the grid."""


class DegenerateStateError(ZenoError):
    """Operation on a state with (numerically) zero norm."""


class DegenerateTrajectoryError(ZenoError):
    """A stroke projected the state to zero; ``partial`` holds what was recorded."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class OracleInvalidError(ZenoError):
    pass


class PredictorRangeError(ZenoError):
    pass


class RunFailedError(ZenoError):
    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records or []
