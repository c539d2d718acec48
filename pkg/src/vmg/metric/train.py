"""Training loop for the metric model."""

import math
import os

import numpy as np

from ..data import TransitionSampler
from ..errors import NumericFaultError
from ..nn import Adam
from ..nn import autodiff as ad
from .losses import metric_loss
from .model import MARGIN, FEATURE_DIM, MetricModel

CHECKPOINT_EVERY = 50


def checkpoint_name(epoch):
    return f"metric-{epoch:04d}.npz"


def train_metric(
    dataset,
    seed,
    out_dir,
    epochs=800,
    batch_size=100,
    lr=1e-3,
    feature_dim=FEATURE_DIM,
    margin=MARGIN,
    steps_per_epoch=None,
    checkpoint_every=CHECKPOINT_EVERY,
    log=None,
):
    """Returns (model, history, checkpoint_paths).

    One epoch is ceil(n_transitions / batch_size) uniform batches unless
    steps_per_epoch caps it. Checkpoints land in out_dir every
    checkpoint_every epochs plus the final epoch; on a numeric fault the
    loop aborts but checkpoints already written stay on disk.
    """
    init_rng, sample_rng = _rng_pair(seed)
    model = MetricModel.create(dataset.obs_dim, dataset.action_dim, init_rng, feature_dim)
    opt = Adam(model.params(), lr=lr, names=model.param_names())
    sampler = TransitionSampler(dataset)

    steps = math.ceil(dataset.n_transitions / batch_size)
    if steps_per_epoch is not None:
        steps = min(steps, int(steps_per_epoch))

    os.makedirs(out_dir, exist_ok=True)
    history, paths = [], []
    for epoch in range(1, epochs + 1):
        tot = c = a = 0.0
        for _ in range(steps):
            batch = sampler.sample(batch_size, sample_rng)
            model.zero_grad()
            loss, lc, la = metric_loss(model, batch.states, batch.actions, batch.next_states, margin)
            if not np.isfinite(loss.data):
                raise NumericFaultError(f"metric loss non-finite at epoch {epoch}")
            ad.backward(loss)
            opt.step()
            tot += float(loss.data)
            c += float(lc.data)
            a += float(la.data)
        rec = {
            "epoch": epoch,
            "loss": tot / steps,
            "loss_contrastive": c / steps,
            "loss_action": a / steps,
        }
        history.append(rec)
        if log is not None:
            log(rec)
        if epoch % checkpoint_every == 0 or epoch == epochs:
            path = os.path.join(out_dir, checkpoint_name(epoch))
            model.save(path, metadata=rec, adam=opt)
            paths.append(path)
    return model, history, paths


def _rng_pair(seed):
    init_ss, sample_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(sample_ss)
