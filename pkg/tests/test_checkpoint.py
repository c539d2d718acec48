import numpy as np
import pytest

from vmg.errors import SchemaError
from vmg.nn import Adam, Mlp, load_checkpoint, save_checkpoint
from vmg.serialize import file_sha256, write_npz


def make_nets(seed=0):
    rng = np.random.default_rng(seed)
    return {
        "enc_s": Mlp.create([4, 8, 3], rng),
        "enc_a": Mlp.create([5, 8, 3], rng),
    }


def test_roundtrip_params_and_metadata(tmp_path):
    nets = make_nets()
    path = tmp_path / "ck.npz"
    save_checkpoint(path, nets, metadata={"epoch": 50, "loss": 0.25})
    loaded, meta = load_checkpoint(path)
    assert meta == {"epoch": 50, "loss": 0.25}
    assert list(loaded) == ["enc_s", "enc_a"]
    for name in nets:
        for a, b in zip(nets[name].params(), loaded[name].params()):
            np.testing.assert_array_equal(a.data, b.data)


def test_roundtrip_adam_state(tmp_path):
    nets = make_nets(1)
    params = [p for net in nets.values() for p in net.params()]
    opt = Adam(params, lr=1e-3)
    rng = np.random.default_rng(9)
    for _ in range(2):
        for p in params:
            p.grad = rng.normal(size=p.data.shape)
        opt.step()

    path = tmp_path / "ck.npz"
    save_checkpoint(path, nets, metadata={}, adam=opt)
    loaded, _, opt2 = load_checkpoint(path, with_adam=True)

    # One identical grad step must land both copies on identical params.
    params2 = [p for net in loaded.values() for p in net.params()]
    for p, q in zip(params, params2):
        g = rng.normal(size=p.data.shape)
        p.grad = g.copy()
        q.grad = g.copy()
    opt.step()
    opt2.step()
    for p, q in zip(params, params2):
        np.testing.assert_array_equal(p.data, q.data)


def test_bytes_are_deterministic(tmp_path):
    a, b = tmp_path / "a.npz", tmp_path / "b.npz"
    save_checkpoint(a, make_nets(3), metadata={"epoch": 1})
    save_checkpoint(b, make_nets(3), metadata={"epoch": 1})
    assert file_sha256(a) == file_sha256(b)


def test_missing_header_rejected(tmp_path):
    path = tmp_path / "bad.npz"
    write_npz(path, stray=np.zeros(3))
    with pytest.raises(SchemaError, match="header"):
        load_checkpoint(path)


def test_missing_layer_rejected(tmp_path):
    path = tmp_path / "ck.npz"
    save_checkpoint(path, make_nets(4))
    import zipfile

    import numpy as np_

    with zipfile.ZipFile(path) as zf:
        keep = {n: zf.read(n) for n in zf.namelist() if n != "enc_a/w1.npy"}
    trimmed = tmp_path / "trimmed.npz"
    with zipfile.ZipFile(trimmed, "w") as zf:
        for n, blob in keep.items():
            zf.writestr(n, blob)
    with pytest.raises(SchemaError, match="enc_a"):
        load_checkpoint(trimmed)
    del np_


def test_version_mismatch_rejected(tmp_path):
    import json

    path = tmp_path / "ck.npz"
    header = {"version": 99, "nets": [], "metadata": {}}
    write_npz(path, __header__=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8))
    with pytest.raises(SchemaError, match="version"):
        load_checkpoint(path)
