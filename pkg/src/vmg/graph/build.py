"""Graph construction: merge states into vertices, then wire edges.

Vertices come from one greedy pass over every state of every episode in
dataset order: a state becomes a new vertex when its squared feature
distance to all existing vertices exceeds gamma_m^2. Every state is then
assigned to its nearest vertex and each dataset transition contributes
either to a directed edge (ends in different vertices) or to a vertex's
internal reward pool (both ends in the same one).
"""

import numpy as np

from .._kernels import classify_batch, greedy_merge
from ..errors import ConsistencyError, InvalidArgumentError
from .memory_graph import MemoryGraph

REWARD_MODES = ("avg_with_internal", "max", "sum", "rm", "rm_h", "rm_t")

_AGG = {"avg_with_internal": np.mean, "max": np.max, "sum": np.sum}


def edge_reward(mode, cross, internal_src, internal_dst):
    """One edge's reward from its pooled environment rewards.

    cross: rewards of transitions crossing src -> dst (never empty).
    internal_src/internal_dst: rewards of transitions staying inside the
    endpoint vertices; an empty pool contributes 0. The three aggregated
    modes apply their aggregator to every pool; the rm variants keep the
    average but drop internal terms (rm both, rm_h keeps dst, rm_t src).
    """
    if len(cross) == 0:
        raise InvalidArgumentError("edge with no crossing transitions")
    if mode in _AGG:
        agg = _AGG[mode]
        r = float(agg(cross))
        if len(internal_src):
            r += 0.5 * float(agg(internal_src))
        if len(internal_dst):
            r += 0.5 * float(agg(internal_dst))
        return r
    if mode == "rm":
        return float(np.mean(cross))
    if mode == "rm_h":
        r = float(np.mean(cross))
        if len(internal_dst):
            r += 0.5 * float(np.mean(internal_dst))
        return r
    if mode == "rm_t":
        r = float(np.mean(cross))
        if len(internal_src):
            r += 0.5 * float(np.mean(internal_src))
        return r
    raise InvalidArgumentError(f"unknown reward mode {mode!r}; known: {REWARD_MODES}")


def pool_transitions(dataset, assignment):
    """Group transition rewards by their vertex endpoints.

    Returns (cross, internal, n_cross): cross maps (src, dst) pairs with
    src != dst to reward lists, internal maps vertex -> reward list.
    Transitions never span episodes because pairing walks each episode's
    own state rows.
    """
    offsets = dataset.state_offsets()
    cross, internal = {}, {}
    n_cross = 0
    for e, ep in enumerate(dataset.episodes):
        base = offsets[e]
        for t in range(len(ep)):
            j1 = int(assignment[base + t])
            j2 = int(assignment[base + t + 1])
            r = float(ep.rewards[t])
            if j1 == j2:
                internal.setdefault(j1, []).append(r)
            else:
                cross.setdefault((j1, j2), []).append(r)
                n_cross += 1
    return cross, internal, n_cross


def build_graph(dataset, model, gamma_m, reward_mode="avg_with_internal", metadata=None):
    if gamma_m <= 0.0:
        raise InvalidArgumentError("gamma_m must be positive")
    if reward_mode not in REWARD_MODES:
        raise InvalidArgumentError(f"unknown reward mode {reward_mode!r}; known: {REWARD_MODES}")

    states = dataset.all_states()
    feats = model.encode_state(states)
    vertex_rows = greedy_merge(feats, gamma_m)
    vertex_feats = feats[vertex_rows]
    assignment = classify_batch(feats, vertex_feats)

    cross, internal, n_cross = pool_transitions(dataset, assignment)
    empty = ()
    edges = sorted(cross)
    rewards = np.array(
        [
            edge_reward(reward_mode, cross[e], internal.get(e[0], empty), internal.get(e[1], empty))
            for e in edges
        ],
        dtype=np.float64,
    )
    edge_arr = np.array(edges, dtype=np.int64).reshape(len(edges), 2)

    return MemoryGraph(
        gamma_m=float(gamma_m),
        reward_mode=reward_mode,
        vertex_features=vertex_feats,
        vertex_states=states[vertex_rows],
        vertex_rows=vertex_rows,
        edge_src=edge_arr[:, 0],
        edge_dst=edge_arr[:, 1],
        edge_rewards=rewards,
        n_env_transitions=dataset.n_transitions,
        n_cross_transitions=n_cross,
        metadata=dict(metadata or {}),
    )


def check_invariants(graph, dataset, model):
    """Recompute everything from scratch and compare; raises ConsistencyError.

    Covers: greedy separation of vertices, first-state-is-vertex, nearest
    vertex assignment with lowest-id ties, no self edges, deduplicated
    edges each witnessed by a same-episode transition, reward values, and
    transition counts.
    """
    states = dataset.all_states()
    feats = model.encode_state(states)

    if graph.n_vertices < 1 or graph.vertex_rows[0] != 0:
        raise ConsistencyError("first dataset state must be vertex 0")
    if not np.array_equal(np.sort(graph.vertex_rows), graph.vertex_rows):
        raise ConsistencyError("vertex rows not in dataset order")
    if not np.allclose(feats[graph.vertex_rows], graph.vertex_features):
        raise ConsistencyError("stored vertex features disagree with the encoder")

    # Pairwise separation: greedy admits a vertex only when farther than
    # gamma_m from every earlier one, which makes the property symmetric.
    vf = graph.vertex_features
    d2 = np.sum((vf[:, None, :] - vf[None, :, :]) ** 2, axis=2)
    np.fill_diagonal(d2, np.inf)
    if np.min(d2) <= graph.gamma_m**2:
        raise ConsistencyError("two vertices closer than gamma_m")

    # Between consecutive vertices every state must have been mergeable.
    assignment = classify_batch(feats, vf)
    d2_all = np.sum((feats[:, None, :] - vf[None, :, :]) ** 2, axis=2)
    best = np.argmin(d2_all, axis=1)
    if not np.array_equal(best, assignment):
        raise ConsistencyError("assignment is not nearest-vertex (lowest id on ties)")
    vertex_set = set(int(v) for v in graph.vertex_rows)
    n_before = np.cumsum([1 if i in vertex_set else 0 for i in range(len(states))])
    for i in range(len(states)):
        if i not in vertex_set:
            k = int(n_before[i])
            if np.min(d2_all[i, :k]) > graph.gamma_m**2:
                raise ConsistencyError(f"state {i} should have become a vertex")

    cross, internal, n_cross = pool_transitions(dataset, assignment)
    expect_edges = sorted(cross)
    got_edges = list(zip(graph.edge_src.tolist(), graph.edge_dst.tolist()))
    if got_edges != expect_edges:
        raise ConsistencyError("edge set mismatch against recomputed transitions")
    if any(s == d for s, d in got_edges):
        raise ConsistencyError("self edge present")
    if len(set(got_edges)) != len(got_edges):
        raise ConsistencyError("duplicate edges present")
    empty = ()
    for i, e in enumerate(expect_edges):
        want = edge_reward(
            graph.reward_mode, cross[e], internal.get(e[0], empty), internal.get(e[1], empty)
        )
        if not np.isclose(graph.edge_rewards[i], want, rtol=1e-12, atol=1e-12):
            raise ConsistencyError(f"edge {e} reward {graph.edge_rewards[i]} != {want}")

    if graph.n_env_transitions != dataset.n_transitions:
        raise ConsistencyError("environment transition count mismatch")
    if graph.n_cross_transitions != n_cross:
        raise ConsistencyError("cross transition count mismatch")
    return True
