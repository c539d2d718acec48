"""Environment interface and registry.

Environments here are deliberately small: deterministic dynamics, the
only randomness is reset jitter, so a rollout is a pure function of
(policy, reset seed). Score anchors are frozen per environment and feed
the normalized-score formula in the evaluator.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int
    action_dim: int
    action_low: float
    action_high: float
    max_steps: int
    random_score: float
    expert_score: float


class Env:
    """Protocol: subclasses set .spec and implement reset/step."""

    spec: EnvSpec

    def reset(self, seed=None):
        raise NotImplementedError

    def step(self, action):
        """Returns (obs, reward, done, info); info carries 'success'."""
        raise NotImplementedError

    def clip_action(self, action):
        return np.clip(np.asarray(action, dtype=np.float64), self.spec.action_low, self.spec.action_high)


_REGISTRY = {}


def register(name, factory):
    if name in _REGISTRY:
        raise InvalidArgumentError(f"environment {name!r} already registered")
    _REGISTRY[name] = factory


def make(name, **kwargs):
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown environment {name!r}; known: {sorted(_REGISTRY)}"
        ) from None
    return factory(**kwargs)


def env_names():
    return sorted(_REGISTRY)
