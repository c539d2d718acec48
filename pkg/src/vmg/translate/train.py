"""Supervised training of the translator.

Targets come from the dataset alone: for an anchor transition at time t
and a goal state k steps later (k uniform up to k_max, truncated near
episode ends), the label is the action actually taken at t. Rewards are
never read here, which is what lets a trained translator serve any
relabeled task.
"""

import math
import os

import numpy as np

from ..data import PairSampler
from ..errors import NumericFaultError
from ..nn import Adam
from ..nn import autodiff as ad
from .model import Translator

K_MAX = 10
CHECKPOINT_EVERY = 50


def checkpoint_name(epoch):
    return f"translator-{epoch:04d}.npz"


def translator_loss(translator, batch):
    pred = translator.translate_t(batch.states, batch.goal_states)
    return ad.mean(ad.tsum(ad.square(ad.sub(pred, ad.Tensor(batch.actions))), axis=1))


def train_translator(
    dataset,
    seed,
    out_dir,
    epochs=800,
    batch_size=100,
    lr=1e-3,
    k_max=K_MAX,
    steps_per_epoch=None,
    checkpoint_every=CHECKPOINT_EVERY,
    log=None,
):
    """Returns (translator, history, checkpoint_paths); mirrors train_metric."""
    init_ss, sample_ss = np.random.SeedSequence(seed).spawn(2)
    init_rng = np.random.default_rng(init_ss)
    sample_rng = np.random.default_rng(sample_ss)

    translator = Translator.create(dataset.obs_dim, dataset.action_dim, init_rng)
    opt = Adam(translator.params(), lr=lr, names=["tran"] * len(translator.params()))
    sampler = PairSampler(dataset, k_max)

    steps = math.ceil(dataset.n_transitions / batch_size)
    if steps_per_epoch is not None:
        steps = min(steps, int(steps_per_epoch))

    os.makedirs(out_dir, exist_ok=True)
    history, paths = [], []
    for epoch in range(1, epochs + 1):
        tot = 0.0
        for _ in range(steps):
            batch = sampler.sample(batch_size, sample_rng)
            translator.zero_grad()
            loss = translator_loss(translator, batch)
            if not np.isfinite(loss.data):
                raise NumericFaultError(f"translator loss non-finite at epoch {epoch}")
            ad.backward(loss)
            opt.step()
            tot += float(loss.data)
        rec = {"epoch": epoch, "loss": tot / steps}
        history.append(rec)
        if log is not None:
            log(rec)
        if epoch % checkpoint_every == 0 or epoch == epochs:
            path = os.path.join(out_dir, checkpoint_name(epoch))
            translator.save(path, metadata=rec, adam=opt)
            paths.append(path)
    return translator, history, paths
