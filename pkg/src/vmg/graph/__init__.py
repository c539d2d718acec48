from .build import REWARD_MODES, build_graph, check_invariants, edge_reward, pool_transitions
from .layout import export_layout, project_vertices
from .memory_graph import MemoryGraph

__all__ = [
    "REWARD_MODES",
    "build_graph",
    "check_invariants",
    "edge_reward",
    "pool_transitions",
    "export_layout",
    "project_vertices",
    "MemoryGraph",
]
