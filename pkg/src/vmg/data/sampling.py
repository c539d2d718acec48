"""Minibatch sampling and reward relabeling over a fixed dataset."""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError


@dataclass
class TransitionBatch:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray


@dataclass
class PairBatch:
    """Anchor state, a state k steps later in the same episode, and the
    action taken at the anchor. k varies per row."""

    states: np.ndarray
    goal_states: np.ndarray
    actions: np.ndarray
    gaps: np.ndarray


class TransitionSampler:
    """Uniform i.i.d. transitions, index tables built once."""

    def __init__(self, dataset):
        self._s, self._a, self._r, self._s2 = dataset.flat_transitions()

    def sample(self, batch_size, rng):
        if batch_size < 1:
            raise InvalidArgumentError("batch_size must be positive")
        idx = rng.integers(0, len(self._a), size=batch_size)
        return TransitionBatch(self._s[idx], self._a[idx], self._r[idx], self._s2[idx])


class PairSampler:
    """Uniform anchor transition, then gap k ~ Uniform{1..min(k_max, steps left)}.

    Anchors near an episode end get their k range truncated instead of
    being skipped, so every transition stays reachable.
    """

    def __init__(self, dataset, k_max):
        if k_max < 1:
            raise InvalidArgumentError("k_max must be at least 1")
        self._k_max = k_max
        self._states = dataset.all_states()
        offsets = dataset.state_offsets()
        anchor_rows = []
        actions = []
        remaining = []
        for e, ep in enumerate(dataset.episodes):
            base = offsets[e]
            for t in range(len(ep)):
                anchor_rows.append(base + t)
                remaining.append(len(ep) - t)
            actions.append(ep.actions)
        self._anchor_rows = np.asarray(anchor_rows, dtype=np.int64)
        self._remaining = np.asarray(remaining, dtype=np.int64)
        self._actions = np.concatenate(actions, axis=0)

    def sample(self, batch_size, rng):
        if batch_size < 1:
            raise InvalidArgumentError("batch_size must be positive")
        idx = rng.integers(0, len(self._anchor_rows), size=batch_size)
        hi = np.minimum(self._remaining[idx], self._k_max)
        gaps = rng.integers(1, hi + 1)
        rows = self._anchor_rows[idx]
        return PairBatch(
            states=self._states[rows],
            goal_states=self._states[rows + gaps],
            actions=self._actions[idx],
            gaps=gaps,
        )


def relabel_rewards(dataset, reward_fn, metadata=None):
    """New Dataset with rewards recomputed as reward_fn(s, a, s_next).

    reward_fn takes (T, obs_dim), (T, action_dim), (T, obs_dim) arrays and
    returns (T,) rewards; trajectories are untouched.
    """
    rewards = []
    for ep in dataset.episodes:
        r = np.asarray(reward_fn(ep.states[:-1], ep.actions, ep.states[1:]), dtype=np.float64)
        if r.shape != (len(ep),):
            raise InvalidArgumentError(
                f"reward_fn returned shape {r.shape}, expected ({len(ep)},)"
            )
        rewards.append(r)
    return dataset.with_rewards(rewards, metadata=metadata)


__all__ = [
    "TransitionBatch",
    "PairBatch",
    "TransitionSampler",
    "PairSampler",
    "relabel_rewards",
]
