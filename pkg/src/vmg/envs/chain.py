"""A one-dimensional chain: cheap, fully enumerable, used in tests."""

import numpy as np

from ..errors import InvalidArgumentError
from .base import Env, EnvSpec, register

MOVE_THRESHOLD = 1.0 / 3.0


class ChainEnv(Env):
    """Cells 0..n-1; start at 0, reward 1.0 on reaching the last cell.

    The action is a scalar in [-1, 1]: above the threshold steps right,
    below its negative steps left, otherwise stays put.
    """

    def __init__(self, n_cells=8, max_steps=40, terminate_at_goal=True):
        if n_cells < 2:
            raise InvalidArgumentError("chain needs at least 2 cells")
        self.n_cells = n_cells
        self.terminate_at_goal = terminate_at_goal
        self.spec = EnvSpec(
            name="chain",
            obs_dim=1,
            action_dim=1,
            action_low=-1.0,
            action_high=1.0,
            max_steps=max_steps,
            random_score=0.135,
            expert_score=1.0,
        )
        self._cell = None
        self._steps = 0

    def for_collection(self):
        """Non-terminating twin; see PointMaze.for_collection."""
        return ChainEnv(self.n_cells, self.spec.max_steps, terminate_at_goal=False)

    def reset(self, seed=None):
        del seed  # no jitter: every episode starts in cell 0
        self._cell = 0
        self._steps = 0
        return np.array([0.0])

    def step(self, action):
        if self._cell is None:
            raise InvalidArgumentError("step before reset")
        a = self.clip_action(action)
        if a.shape != (1,):
            raise InvalidArgumentError(f"action shape {a.shape}, expected (1,)")
        if a[0] > MOVE_THRESHOLD:
            self._cell = min(self._cell + 1, self.n_cells - 1)
        elif a[0] < -MOVE_THRESHOLD:
            self._cell = max(self._cell - 1, 0)
        self._steps += 1
        success = self._cell == self.n_cells - 1
        done = (success and self.terminate_at_goal) or self._steps >= self.spec.max_steps
        return np.array([float(self._cell)]), (1.0 if success else 0.0), done, {"success": success}


register("chain", ChainEnv)
