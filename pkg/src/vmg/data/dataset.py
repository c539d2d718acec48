"""In-memory model of a fixed offline dataset.

An episode stores T+1 states and the T actions/rewards between them, so
transition chaining (next state of step i is state i+1) holds by
construction and never needs re-checking downstream.
"""

import numpy as np

from ..errors import InvalidArgumentError


class Episode:
    __slots__ = ("states", "actions", "rewards")

    def __init__(self, states, actions, rewards):
        states = np.asarray(states, dtype=np.float64)
        actions = np.asarray(actions, dtype=np.float64)
        rewards = np.asarray(rewards, dtype=np.float64)
        if states.ndim != 2 or states.shape[0] < 2:
            raise InvalidArgumentError("episode needs at least two states, shaped (T+1, obs_dim)")
        if actions.ndim != 2 or actions.shape[0] != states.shape[0] - 1:
            raise InvalidArgumentError(
                f"expected {states.shape[0] - 1} actions, got shape {actions.shape}"
            )
        if rewards.shape != (actions.shape[0],):
            raise InvalidArgumentError(f"rewards shape {rewards.shape} does not match actions")
        for name, a in (("states", states), ("actions", actions), ("rewards", rewards)):
            if not np.all(np.isfinite(a)):
                raise InvalidArgumentError(f"non-finite values in episode {name}")
        self.states = states
        self.actions = actions
        self.rewards = rewards

    def __len__(self):
        """Number of transitions."""
        return self.actions.shape[0]

    @property
    def obs_dim(self):
        return self.states.shape[1]

    @property
    def action_dim(self):
        return self.actions.shape[1]

    def transitions(self):
        for t in range(len(self)):
            yield self.states[t], self.actions[t], self.rewards[t], self.states[t + 1]


class Dataset:
    """Episodes plus the metadata needed to interpret them."""

    def __init__(self, episodes, metadata=None):
        episodes = list(episodes)
        if not episodes:
            raise InvalidArgumentError("dataset has no episodes")
        obs_dim = episodes[0].obs_dim
        action_dim = episodes[0].action_dim
        for i, ep in enumerate(episodes):
            if ep.obs_dim != obs_dim or ep.action_dim != action_dim:
                raise InvalidArgumentError(f"episode {i} dims disagree with episode 0")
        self.episodes = episodes
        self.metadata = dict(metadata or {})

    @property
    def obs_dim(self):
        return self.episodes[0].obs_dim

    @property
    def action_dim(self):
        return self.episodes[0].action_dim

    @property
    def n_episodes(self):
        return len(self.episodes)

    @property
    def n_transitions(self):
        return sum(len(ep) for ep in self.episodes)

    def all_states(self):
        """Every state of every episode, stacked in dataset order."""
        return np.concatenate([ep.states for ep in self.episodes], axis=0)

    def state_offsets(self):
        """Start row of each episode inside all_states(); last entry is the total."""
        offsets = np.zeros(self.n_episodes + 1, dtype=np.int64)
        np.cumsum([ep.states.shape[0] for ep in self.episodes], out=offsets[1:])
        return offsets

    def flat_transitions(self):
        """(states, actions, rewards, next_states) over the whole dataset."""
        s = np.concatenate([ep.states[:-1] for ep in self.episodes], axis=0)
        a = np.concatenate([ep.actions for ep in self.episodes], axis=0)
        r = np.concatenate([ep.rewards for ep in self.episodes], axis=0)
        s2 = np.concatenate([ep.states[1:] for ep in self.episodes], axis=0)
        return s, a, r, s2

    def with_rewards(self, rewards_per_episode, metadata=None):
        """Same trajectories, new reward arrays (one per episode)."""
        if len(rewards_per_episode) != self.n_episodes:
            raise InvalidArgumentError("reward list length does not match episode count")
        episodes = [
            Episode(ep.states, ep.actions, r) for ep, r in zip(self.episodes, rewards_per_episode)
        ]
        return Dataset(episodes, metadata if metadata is not None else self.metadata)
