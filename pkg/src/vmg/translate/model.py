"""Goal-conditioned action translator: Tran(s, s_goal) -> action."""

import numpy as np

from ..errors import InvalidArgumentError
from ..nn import Mlp, Tensor, load_checkpoint, save_checkpoint
from ..nn import autodiff as ad


class Translator:
    def __init__(self, net):
        if net.in_dim % 2 != 0:
            raise InvalidArgumentError("translator input must be two stacked states")
        self.net = net

    @classmethod
    def create(cls, obs_dim, action_dim, rng):
        return cls(Mlp.default(2 * obs_dim, action_dim, rng))

    @property
    def obs_dim(self):
        return self.net.in_dim // 2

    @property
    def action_dim(self):
        return self.net.out_dim

    def params(self):
        return self.net.params()

    def zero_grad(self):
        self.net.zero_grad()

    def translate(self, states, goal_states):
        """Array path; accepts single states or batches."""
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        goal_states = np.atleast_2d(np.asarray(goal_states, dtype=np.float64))
        if goal_states.shape[0] == 1 and states.shape[0] > 1:
            goal_states = np.broadcast_to(goal_states, states.shape)
        return self.net.forward_array(np.concatenate([states, goal_states], axis=1))

    def translate_t(self, states, goal_states):
        return self.net(ad.concat_cols(Tensor(states), Tensor(goal_states)))

    def save(self, path, metadata=None, adam=None):
        save_checkpoint(path, {"tran": self.net}, metadata=metadata, adam=adam)

    @classmethod
    def load(cls, path):
        nets, metadata = load_checkpoint(path)
        if "tran" not in nets:
            raise InvalidArgumentError(f"{path}: checkpoint lacks 'tran'")
        return cls(nets["tran"]), metadata
