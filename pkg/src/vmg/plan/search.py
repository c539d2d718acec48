"""Subgoal selection: bounded-horizon value search plus weighted Dijkstra.

The planner first looks N_s hops ahead (None = the whole reachable set)
for the best-value vertex v*, then plans the lightest path to it, where
an edge's weight is the gap between the graph's best edge reward and its
own. Ties are resolved deterministically everywhere: best vertex by
value, then fewest hops, then lowest id; paths by weight, then
lexicographically smallest vertex sequence.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError, PlanningError


@dataclass(frozen=True)
class PlanConfig:
    discount: float = 0.8
    n_search_steps: int | None = None  # N_s; None searches to closure
    n_subgoal: int = 1  # N_sg; path index handed to the translator
    greedy: bool = False  # skip search + Dijkstra, follow one best edge

    def __post_init__(self):
        if not 0.0 <= self.discount < 1.0:
            raise InvalidArgumentError("discount must be in [0, 1)")
        if self.n_search_steps is not None and self.n_search_steps < 1:
            raise InvalidArgumentError("n_search_steps must be positive or None")
        if self.n_subgoal < 1:
            raise InvalidArgumentError("n_subgoal must be at least 1")


def edge_weights(graph):
    """max(R_G) - R_G per edge: nonnegative, best edge gets weight 0."""
    if graph.n_edges == 0:
        return np.zeros(0)
    return graph.edge_rewards.max() - graph.edge_rewards


def best_future_vertex(graph, values, start, n_steps=None):
    """Highest-value vertex within n_steps hops of start (start included).

    Ties prefer fewer hops, then the lower vertex id. Returns the start
    itself when nothing reachable beats it.
    """
    if not 0 <= start < graph.n_vertices:
        raise InvalidArgumentError(f"start vertex {start} out of range")
    limit = np.inf if n_steps is None else n_steps
    best = start
    best_val = values[start]
    best_hops = 0
    seen = {start}
    frontier = [start]
    hops = 0
    while frontier and hops < limit:
        hops += 1
        nxt = []
        for v in frontier:
            dst, _ = graph.out_edges(v)
            for u in dst:
                u = int(u)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
                    if values[u] > best_val or (
                        values[u] == best_val and (hops, u) < (best_hops, best)
                    ):
                        best, best_val, best_hops = u, values[u], hops
        frontier = nxt
    return best


def shortest_path(graph, weights, src, dst):
    """Minimal-weight path as a vertex list; exact lexicographic tie-break.

    Heap entries carry the whole path tuple, so equal-weight candidates
    pop in lexicographic order and the first settled path is the
    canonical one. Raises PlanningError when dst is unreachable.
    """
    if weights.shape != (graph.n_edges,):
        raise InvalidArgumentError("weights length does not match edge count")
    if not (0 <= src < graph.n_vertices and 0 <= dst < graph.n_vertices):
        raise InvalidArgumentError("endpoint out of range")
    if src == dst:
        return [src]
    row_ptr, edge_dst, _ = graph.csr()
    settled = set()
    heap = [(0.0, (src,))]
    while heap:
        d, path = heapq.heappop(heap)
        v = path[-1]
        if v in settled:
            continue
        settled.add(v)
        if v == dst:
            return list(path)
        lo, hi = row_ptr[v], row_ptr[v + 1]
        for k in range(lo, hi):
            u = int(edge_dst[k])
            if u not in settled:
                heapq.heappush(heap, (d + weights[k], path + (u,)))
    raise PlanningError(f"no path from vertex {src} to {dst}")


def select_graph_action(graph, values, v_current, config):
    """The subgoal vertex the translator should steer toward.

    Dijkstra route: v* from bounded search, shortest path to it, then the
    N_sg-th path vertex (clamped to the path end). Greedy route: the
    out-edge maximizing reward + discount * V(dst); raises PlanningError
    at sinks.
    """
    if config.greedy:
        dst, rewards = graph.out_edges(v_current)
        if dst.size == 0:
            raise PlanningError(f"vertex {v_current} has no outgoing edge")
        score = rewards + config.discount * values[dst]
        return int(dst[np.argmax(score)])

    target = best_future_vertex(graph, values, v_current, config.n_search_steps)
    path = shortest_path(graph, edge_weights(graph), v_current, target)
    return path[min(config.n_subgoal, len(path) - 1)]
