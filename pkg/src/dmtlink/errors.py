"""Exception types shared across the package."""


class FrameSizeError(ValueError):
    """Bit or sample counts do not tile into whole frames."""


class PlanError(ValueError):
    """A subcarrier plan violates its structural constraints."""


class InfeasibleRateError(ValueError):
    """The requested bit target cannot be met; carries the achievable max."""

    def __init__(self, target_bits: int, max_bits: int):
        super().__init__(
            f"bit target {target_bits} infeasible, at most {max_bits} loadable")
        self.target_bits = target_bits
        self.max_bits = max_bits


class SyncFailureError(RuntimeError):
    """Preamble correlation peak below the detection threshold."""


class InsufficientDataError(ValueError):
    """Too few frames or samples for a statistically meaningful estimate."""


class InsufficientStatisticsError(ValueError):
    """Too few bits counted to resolve the FEC decision threshold."""


class RecordLengthError(ValueError):
    """Record too short for the requested propagation distance."""


class ConfigError(ValueError):
    """Malformed configuration key, value, or file."""


class CalibrationError(RuntimeError):
    """Calibration search failed to converge."""
