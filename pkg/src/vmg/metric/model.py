"""The three networks that define the learned metric space.

enc_s maps a state to a feature f_s. enc_a maps (f_s, a) to a feature
displacement, so f_s + enc_a(f_s, a) predicts the next state's feature.
dec_a inverts that: given f_s and a displacement, it reconstructs the
action that causes it.
"""

import numpy as np

from ..errors import InvalidArgumentError
from ..nn import Mlp, load_checkpoint, save_checkpoint
from ..nn import autodiff as ad

FEATURE_DIM = 10
MARGIN = 1.0


class MetricModel:
    def __init__(self, enc_s, enc_a, dec_a):
        d = enc_s.out_dim
        if enc_a.in_dim != d + dec_a.out_dim or enc_a.out_dim != d:
            raise InvalidArgumentError("enc_a dims do not match enc_s/dec_a")
        if dec_a.in_dim != 2 * d:
            raise InvalidArgumentError("dec_a must take (f_s, delta) pairs")
        self.enc_s = enc_s
        self.enc_a = enc_a
        self.dec_a = dec_a

    @classmethod
    def create(cls, obs_dim, action_dim, rng, feature_dim=FEATURE_DIM):
        return cls(
            enc_s=Mlp.default(obs_dim, feature_dim, rng),
            enc_a=Mlp.default(feature_dim + action_dim, feature_dim, rng),
            dec_a=Mlp.default(2 * feature_dim, action_dim, rng),
        )

    @property
    def feature_dim(self):
        return self.enc_s.out_dim

    @property
    def obs_dim(self):
        return self.enc_s.in_dim

    @property
    def action_dim(self):
        return self.dec_a.out_dim

    def params(self):
        return self.enc_s.params() + self.enc_a.params() + self.dec_a.params()

    def param_names(self):
        return (
            ["enc_s"] * len(self.enc_s.params())
            + ["enc_a"] * len(self.enc_a.params())
            + ["dec_a"] * len(self.dec_a.params())
        )

    def zero_grad(self):
        for net in (self.enc_s, self.enc_a, self.dec_a):
            net.zero_grad()

    # Inference paths (plain arrays).

    def encode_state(self, states):
        return self.enc_s.forward_array(states)

    def predict_next_feature(self, f_s, actions):
        f_s = np.atleast_2d(np.asarray(f_s, dtype=np.float64))
        actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
        return f_s + self.enc_a.forward_array(np.concatenate([f_s, actions], axis=1))

    def decode_action(self, f_s, delta):
        f_s = np.atleast_2d(np.asarray(f_s, dtype=np.float64))
        delta = np.atleast_2d(np.asarray(delta, dtype=np.float64))
        return self.dec_a.forward_array(np.concatenate([f_s, delta], axis=1))

    # Training paths (autodiff Tensors).

    def encode_state_t(self, states):
        return self.enc_s(states)

    def predict_next_feature_t(self, f_s, actions):
        return ad.add(f_s, self.enc_a(ad.concat_cols(f_s, actions)))

    def decode_action_t(self, f_s, delta):
        return self.dec_a(ad.concat_cols(f_s, delta))

    def save(self, path, metadata=None, adam=None):
        save_checkpoint(
            path,
            {"enc_s": self.enc_s, "enc_a": self.enc_a, "dec_a": self.dec_a},
            metadata=metadata,
            adam=adam,
        )

    @classmethod
    def load(cls, path):
        nets, metadata = load_checkpoint(path)
        for key in ("enc_s", "enc_a", "dec_a"):
            if key not in nets:
                raise InvalidArgumentError(f"{path}: checkpoint lacks {key!r}")
        return cls(nets["enc_s"], nets["enc_a"], nets["dec_a"]), metadata
