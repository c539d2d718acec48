from .search import (
    PlanConfig,
    best_future_vertex,
    edge_weights,
    select_graph_action,
    shortest_path,
)
from .value_iteration import VI_MAX_ITERS, VI_TOL, ValueTable, value_iteration

__all__ = [
    "PlanConfig",
    "best_future_vertex",
    "edge_weights",
    "select_graph_action",
    "shortest_path",
    "VI_MAX_ITERS",
    "VI_TOL",
    "ValueTable",
    "value_iteration",
]
