"""Losses that shape the metric space.

Contrastive: the predicted next feature f_s + enc_a(f_s, a) must sit on
the true next feature (squared distance), while staying at least
sqrt(margin) away from the other next features in the batch, hinged on
squared distance. The other batch rows double as the negatives.

Action reconstruction: dec_a must recover a from (f_s, f_s' - f_s), with
a hinge keeping the displacement norm itself below the margin.

Both reduce by batch mean; the negative term averages over its B-1
negatives first.
"""

import numpy as np

from ..errors import InvalidArgumentError
from ..nn import Tensor
from ..nn import autodiff as ad
from .model import MARGIN


def contrastive_loss(model, states, actions, next_states, margin=MARGIN):
    b = states.shape[0]
    if b < 2:
        raise InvalidArgumentError("contrastive loss needs a batch of at least 2")
    f_s = model.encode_state_t(Tensor(states))
    f_s2 = model.encode_state_t(Tensor(next_states))
    pred = model.predict_next_feature_t(f_s, Tensor(actions))

    pos = ad.mean(ad.tsum(ad.square(ad.sub(pred, f_s2)), axis=1))

    # (B, B) squared distances; row i against every next feature j.
    d2 = ad.pairwise_sqdist(pred, f_s2)
    hinge = ad.relu(ad.rsub_const(margin, d2))
    off_diag = 1.0 - np.eye(b)
    neg = ad.mul_const(ad.tsum(ad.mul_const(hinge, off_diag)), 1.0 / (b * (b - 1)))
    return ad.add(pos, neg)


def action_loss(model, states, actions, next_states, margin=MARGIN):
    f_s = model.encode_state_t(Tensor(states))
    f_s2 = model.encode_state_t(Tensor(next_states))
    delta = ad.sub(f_s2, f_s)
    a_hat = model.decode_action_t(f_s, delta)

    recon = ad.mean(ad.tsum(ad.square(ad.sub(a_hat, Tensor(actions))), axis=1))
    norm = ad.sqrt(ad.tsum(ad.square(delta), axis=1))
    penalty = ad.mean(ad.relu(ad.sub_const(norm, margin)))
    return ad.add(recon, penalty)


def metric_loss(model, states, actions, next_states, margin=MARGIN):
    """Total training loss; returns (total, contrastive, action) Tensors."""
    lc = contrastive_loss(model, states, actions, next_states, margin)
    la = action_loss(model, states, actions, next_states, margin)
    return ad.add(lc, la), lc, la
