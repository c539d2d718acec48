"""Exception types shared across the package."""


class VmgError(Exception):
    pass


class InvalidArgumentError(VmgError, ValueError):
    """Bad argument: shape mismatch, out-of-range value, malformed input."""


class NumericFaultError(VmgError, ArithmeticError):
    """NaN/inf encountered where finite values are required."""


class DatasetParseError(VmgError, ValueError):
    """A dataset file failed to parse; message carries the record index."""


class SchemaError(VmgError, ValueError):
    """Structurally valid file with inconsistent content (dims, chaining)."""


class ConfigError(VmgError, ValueError):
    """Invalid configuration key or value."""


class StateError(VmgError, RuntimeError):
    """Operation invalid in the current object state."""


class PlanningError(VmgError, RuntimeError):
    """Path planning failed (unreachable target)."""


class ConsistencyError(VmgError, RuntimeError):
    """Internal invariant violated; indicates a bug, not bad user input."""
