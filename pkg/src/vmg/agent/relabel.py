"""Reward relabeling and fast replanning on a fixed graph.

The vertex set and edge set depend only on states, so a new reward
function touches nothing learned: recompute the reward pools over the
same assignment, reweight the same edges, rerun value iteration. That
whole path is a second-scale operation even on large graphs.
"""

import numpy as np

from ..data import relabel_rewards
from ..errors import ConsistencyError, InvalidArgumentError
from ..graph import edge_reward, pool_transitions
from ..graph.memory_graph import MemoryGraph
from ..plan import value_iteration


def zero_reward():
    def fn(s, a, s2):
        del a, s2
        return np.zeros(len(s))

    return fn


def _as_center(center):
    center = np.asarray(center, dtype=np.float64)
    if center.ndim != 1 or center.size == 0:
        raise InvalidArgumentError("center must be a non-empty 1-D point")
    return center


def _check_center_dim(states, center):
    # broadcasting would quietly accept a wrong-length center
    if states.shape[1] != center.shape[0]:
        raise InvalidArgumentError(
            f"center has {center.shape[0]} coordinates, states have {states.shape[1]}"
        )


def goal_region_reward(center, radius):
    center = _as_center(center)
    if radius <= 0:
        raise InvalidArgumentError("radius must be positive")

    def fn(s, a, s2):
        del a
        _check_center_dim(s2, center)
        d2 = np.sum((s2 - center) ** 2, axis=1)
        return (d2 <= radius * radius).astype(np.float64)

    return fn


def negative_distance_reward(center):
    center = _as_center(center)

    def fn(s, a, s2):
        del a
        _check_center_dim(s2, center)
        return -np.sqrt(np.sum((s2 - center) ** 2, axis=1))

    return fn


REWARD_FNS = {
    "zero": zero_reward,
    "goal_region": goal_region_reward,
    "negative_distance": negative_distance_reward,
}


def make_reward_fn(name, **params):
    try:
        factory = REWARD_FNS[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown reward function {name!r}; known: {sorted(REWARD_FNS)}"
        ) from None
    return factory(**params)


def relabel_graph(graph, dataset, model, reward_fn, reward_mode=None):
    """Same vertices and edges, rewards recomputed under reward_fn."""
    mode = reward_mode or graph.reward_mode
    relabeled = relabel_rewards(dataset, reward_fn)
    assignment = graph.classify(model.encode_state(relabeled.all_states()))
    cross, internal, n_cross = pool_transitions(relabeled, assignment)

    edges = sorted(cross)
    if edges != list(zip(graph.edge_src.tolist(), graph.edge_dst.tolist())):
        raise ConsistencyError("relabeled dataset induces a different edge set")
    if n_cross != graph.n_cross_transitions:
        raise ConsistencyError("relabeled dataset changes the cross-transition count")

    empty = ()
    rewards = np.array(
        [
            edge_reward(mode, cross[e], internal.get(e[0], empty), internal.get(e[1], empty))
            for e in edges
        ],
        dtype=np.float64,
    )
    return MemoryGraph(
        gamma_m=graph.gamma_m,
        reward_mode=mode,
        vertex_features=graph.vertex_features,
        vertex_states=graph.vertex_states,
        vertex_rows=graph.vertex_rows,
        edge_src=graph.edge_src,
        edge_dst=graph.edge_dst,
        edge_rewards=rewards,
        n_env_transitions=graph.n_env_transitions,
        n_cross_transitions=graph.n_cross_transitions,
        metadata={**graph.metadata, "relabeled": True},
    )


def relabel_and_replan(agent, dataset, reward_fn, discount=None, reward_mode=None):
    """New Agent for a new task on the same trained components."""
    new_graph = relabel_graph(agent.graph, dataset, agent.model, reward_fn, reward_mode)
    values = value_iteration(new_graph, discount or agent.plan_config.discount)
    return agent.replan_with(new_graph, values)
