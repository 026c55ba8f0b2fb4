"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An argument or state violated a documented precondition."""


class GraphParseError(ValueError):
    """A graph file failed to parse; the message carries the line number."""


class ConfigError(ValueError):
    """An experiment config failed validation; the message lists field-level errors."""


class CalibrationError(ConfigError):
    """A noise calibration file failed validation."""
