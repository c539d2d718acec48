"""Metric model and losses.

The loss tests use hand-built affine networks (identity encoders, a
coordinate-picking decoder) so every term can be computed with pencil
and paper; the expected numbers below are exact rationals.
"""

import numpy as np
import pytest

from vmg.data import Dataset, Episode
from vmg.errors import InvalidArgumentError
from vmg.metric import MetricModel, action_loss, contrastive_loss, metric_loss, train_metric
from vmg.nn import Mlp, backward
from vmg.serialize import file_sha256


def hand_model():
    """enc_s = identity (2d), enc_a(f, a) = (a, 0), dec_a(f, delta) = delta_x."""
    enc_s = Mlp([np.eye(2)], [np.zeros(2)])
    w_enc_a = np.zeros((3, 2))
    w_enc_a[2, 0] = 1.0
    enc_a = Mlp([w_enc_a], [np.zeros(2)])
    w_dec = np.zeros((4, 1))
    w_dec[2, 0] = 1.0
    dec_a = Mlp([w_dec], [np.zeros(1)])
    return MetricModel(enc_s, enc_a, dec_a)


def test_contrastive_loss_worked_example():
    model = hand_model()
    s = np.array([[0.0, 0.0], [2.0, 0.0]])
    a = np.array([[1.0], [-1.0]])
    s2 = np.array([[0.6, 0.0], [1.5, 0.0]])
    # pred_0 = (1,0), pred_1 = (1,0)
    # positives: 0.16, 0.25
    # negatives: hinge(1 - 0.25) = 0.75, hinge(1 - 0.16) = 0.84
    # mean(0.91, 1.09) = 1.0
    loss = contrastive_loss(model, s, a, s2, margin=1.0)
    assert float(loss.data) == pytest.approx(1.0, abs=1e-12)


def test_contrastive_negatives_only_off_diagonal():
    model = hand_model()
    # Identical rows: positive distance 0, negative hinge fires at full margin.
    s = np.array([[0.0, 0.0], [0.0, 0.0]])
    a = np.array([[0.5], [0.5]])
    s2 = np.array([[0.5, 0.0], [0.5, 0.0]])
    loss = contrastive_loss(model, s, a, s2, margin=1.0)
    # pos = 0 both rows; each row's one negative is D2=0 -> hinge = 1.
    assert float(loss.data) == pytest.approx(1.0, abs=1e-12)


def test_contrastive_far_negatives_contribute_nothing():
    model = hand_model()
    s = np.array([[0.0, 0.0], [10.0, 0.0]])
    a = np.array([[0.0], [0.0]])
    s2 = np.array([[0.0, 0.0], [10.0, 0.0]])
    loss = contrastive_loss(model, s, a, s2, margin=1.0)
    assert float(loss.data) == pytest.approx(0.0, abs=1e-12)


def test_contrastive_needs_two_rows():
    model = hand_model()
    with pytest.raises(InvalidArgumentError):
        contrastive_loss(model, np.zeros((1, 2)), np.zeros((1, 1)), np.zeros((1, 2)))


def test_action_loss_worked_example():
    model = hand_model()
    s = np.array([[0.0, 0.0], [0.0, 0.0]])
    a = np.array([[1.0], [2.0]])
    s2 = np.array([[0.6, 0.0], [2.0, 0.0]])
    # row 0: recon (0.6-1)^2 = 0.16, norm 0.6 below margin.
    # row 1: recon 0, norm 2 -> penalty 1.
    loss = action_loss(model, s, a, s2, margin=1.0)
    assert float(loss.data) == pytest.approx(0.58, abs=1e-12)


def test_action_loss_zero_displacement_is_finite():
    model = hand_model()
    s = np.array([[1.0, 1.0]])
    a = np.array([[0.0]])
    loss = action_loss(model, s, a, s.copy(), margin=1.0)
    backward(loss)
    assert np.isfinite(float(loss.data))
    for p in model.params():
        if p.grad is not None:
            assert np.all(np.isfinite(p.grad))


def test_metric_loss_is_sum_of_parts():
    rng = np.random.default_rng(0)
    model = MetricModel.create(2, 1, rng, feature_dim=3)
    s = rng.normal(size=(4, 2))
    a = rng.normal(size=(4, 1))
    s2 = rng.normal(size=(4, 2))
    total, lc, la = metric_loss(model, s, a, s2)
    assert float(total.data) == pytest.approx(float(lc.data) + float(la.data), rel=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_loss_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    model = MetricModel.create(2, 1, rng, feature_dim=3)
    # Shrink to a small net so full-coordinate FD stays fast.
    model.enc_s = Mlp.create([2, 6, 3], rng)
    model.enc_a = Mlp.create([4, 6, 3], rng)
    model.dec_a = Mlp.create([6, 6, 1], rng)
    s = rng.normal(size=(3, 2))
    a = rng.normal(size=(3, 1))
    s2 = rng.normal(size=(3, 2))

    loss, _, _ = metric_loss(model, s, a, s2)
    backward(loss)
    grads = [p.grad.copy() if p.grad is not None else np.zeros_like(p.data) for p in model.params()]

    h = 1e-6
    for p, g in zip(model.params(), grads):
        flat = p.data.reshape(-1)
        gf = g.reshape(-1)
        for i in range(0, flat.size, 7):  # every 7th coordinate keeps it quick
            orig = flat[i]
            flat[i] = orig + h
            up = float(metric_loss(model, s, a, s2)[0].data)
            flat[i] = orig - h
            down = float(metric_loss(model, s, a, s2)[0].data)
            flat[i] = orig
            fd = (up - down) / (2 * h)
            assert gf[i] == pytest.approx(fd, rel=2e-4, abs=2e-6)


def test_model_validation():
    rng = np.random.default_rng(1)
    enc_s = Mlp.create([2, 4, 3], rng)
    enc_a = Mlp.create([4, 4, 3], rng)
    dec_a = Mlp.create([6, 4, 1], rng)
    MetricModel(enc_s, enc_a, dec_a)
    with pytest.raises(InvalidArgumentError):
        MetricModel(enc_s, Mlp.create([5, 4, 3], rng), dec_a)
    with pytest.raises(InvalidArgumentError):
        MetricModel(enc_s, enc_a, Mlp.create([5, 4, 1], rng))


def test_inference_matches_training_path():
    rng = np.random.default_rng(2)
    model = MetricModel.create(2, 1, rng, feature_dim=4)
    s = rng.normal(size=(5, 2))
    a = rng.normal(size=(5, 1))
    from vmg.nn import Tensor

    f = model.encode_state(s)
    np.testing.assert_allclose(f, model.encode_state_t(Tensor(s)).data)
    pred = model.predict_next_feature(f, a)
    np.testing.assert_allclose(
        pred, model.predict_next_feature_t(Tensor(f), Tensor(a)).data
    )


def make_tiny_dataset(seed=0, n=6, T=10):
    rng = np.random.default_rng(seed)
    eps = []
    for _ in range(n):
        states = np.cumsum(rng.normal(scale=0.1, size=(T + 1, 2)), axis=0)
        actions = rng.uniform(-1, 1, size=(T, 1))
        eps.append(Episode(states, actions, np.zeros(T)))
    return Dataset(eps)


def test_train_metric_decreases_loss_and_checkpoints(tmp_path):
    ds = make_tiny_dataset()
    model, history, paths = train_metric(
        ds, seed=3, out_dir=tmp_path, epochs=6, batch_size=16, feature_dim=3, checkpoint_every=3
    )
    assert [h["epoch"] for h in history] == list(range(1, 7))
    assert history[-1]["loss"] < history[0]["loss"]
    assert [p.split("/")[-1] for p in paths] == ["metric-0003.npz", "metric-0006.npz"]
    loaded, meta = MetricModel.load(paths[-1])
    assert meta["epoch"] == 6
    s = ds.episodes[0].states[:3]
    np.testing.assert_array_equal(loaded.encode_state(s), model.encode_state(s))


def test_train_metric_is_deterministic(tmp_path):
    ds = make_tiny_dataset()
    kw = dict(seed=5, epochs=2, batch_size=8, feature_dim=3, checkpoint_every=2)
    _, h1, p1 = train_metric(ds, out_dir=tmp_path / "a", **kw)
    _, h2, p2 = train_metric(ds, out_dir=tmp_path / "b", **kw)
    assert h1 == h2
    assert file_sha256(p1[-1]) == file_sha256(p2[-1])
