"""Versioned checkpoint container for one or more named networks.

Layout (single .npz, deterministic bytes):
  __header__        uint8 array of canonical JSON: version, net layer
                    sizes in a fixed name order, user metadata.
  <net>/w<i>, <net>/b<i>   parameter arrays per network.
  adam/m<j>, adam/v<j>, adam/t   optimizer state over the concatenated
                    parameter list (net order as in the header).

Adam state is optional; checkpoints written for inference omit it.
"""

import json

import numpy as np

from ..errors import SchemaError
from ..serialize import canonical_json, read_npz, write_npz
from .adam import Adam
from .mlp import Mlp

FORMAT_VERSION = 1


def _header_array(nets, metadata):
    header = {
        "version": FORMAT_VERSION,
        "nets": [{"name": name, "sizes": net.sizes()} for name, net in nets.items()],
        "metadata": metadata,
    }
    return np.frombuffer(canonical_json(header).encode("utf-8"), dtype=np.uint8)


def save_checkpoint(path, nets, metadata=None, adam=None):
    """Write named Mlps (dict preserves order) and optional Adam state."""
    arrays = {"__header__": _header_array(nets, dict(metadata or {}))}
    for name, net in nets.items():
        for i, (w, b) in enumerate(zip(net.weights, net.biases)):
            arrays[f"{name}/w{i}"] = w.data
            arrays[f"{name}/b{i}"] = b.data
    if adam is not None:
        state = adam.state_arrays()
        for j, (m, v) in enumerate(zip(state["m"], state["v"])):
            arrays[f"adam/m{j}"] = m
            arrays[f"adam/v{j}"] = v
        arrays["adam/t"] = np.array(state["t"], dtype=np.int64)
    write_npz(path, **arrays)


def load_checkpoint(path, with_adam=False, lr=1e-3):
    """Return (nets, metadata) or (nets, metadata, adam) when with_adam."""
    arrays = read_npz(path)
    if "__header__" not in arrays:
        raise SchemaError(f"{path}: not a checkpoint (missing header)")
    try:
        header = json.loads(bytes(arrays["__header__"]).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: corrupt checkpoint header") from exc
    version = header.get("version")
    if version != FORMAT_VERSION:
        raise SchemaError(f"{path}: unsupported checkpoint version {version!r}")

    nets = {}
    for entry in header["nets"]:
        name, sizes = entry["name"], entry["sizes"]
        weights, biases = [], []
        for i in range(len(sizes) - 1):
            try:
                w = arrays[f"{name}/w{i}"]
                b = arrays[f"{name}/b{i}"]
            except KeyError as exc:
                raise SchemaError(f"{path}: missing array for net {name!r} layer {i}") from exc
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise SchemaError(f"{path}: shape mismatch in net {name!r} layer {i}")
            weights.append(w)
            biases.append(b)
        nets[name] = Mlp(weights, biases)

    if not with_adam:
        return nets, header["metadata"]

    params = [p for net in nets.values() for p in net.params()]
    adam = Adam(params, lr=lr)
    if "adam/t" in arrays:
        n = len(params)
        try:
            m = [arrays[f"adam/m{j}"] for j in range(n)]
            v = [arrays[f"adam/v{j}"] for j in range(n)]
        except KeyError as exc:
            raise SchemaError(f"{path}: incomplete optimizer state") from exc
        adam.load_state(m, v, int(arrays["adam/t"]))
    return nets, header["metadata"], adam
