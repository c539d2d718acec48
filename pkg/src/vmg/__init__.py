"""vmg: a graph-structured world model for offline control.

States from a fixed dataset are embedded into a learned metric space,
merged into a compact vertex set, and connected by reward-annotated
edges. Planning runs value iteration and shortest-path search on that
graph; a translator network turns the chosen subgoal into an action.
"""

from ._kernels import backend_name
from .errors import (
    ConfigError,
    ConsistencyError,
    DatasetParseError,
    InvalidArgumentError,
    NumericFaultError,
    PlanningError,
    SchemaError,
    StateError,
    VmgError,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "ConfigError",
    "ConsistencyError",
    "DatasetParseError",
    "InvalidArgumentError",
    "NumericFaultError",
    "PlanningError",
    "SchemaError",
    "StateError",
    "VmgError",
    "__version__",
]
