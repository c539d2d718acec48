"""Dataset files: JSONL for readability, npz for bulk data.

Both carry the same header (version, dims, metadata) and both produce
byte-identical files for equal inputs. load/save dispatch on extension.
"""

import json

import numpy as np

from ..errors import DatasetParseError
from ..serialize import canonical_json, read_npz, write_npz
from .dataset import Dataset, Episode

FORMAT_VERSION = 1
_KIND = "vmg-dataset"


def save(path, dataset):
    path = str(path)
    if path.endswith(".jsonl"):
        save_jsonl(path, dataset)
    elif path.endswith(".npz"):
        save_npz(path, dataset)
    else:
        raise DatasetParseError(f"unknown dataset extension: {path}")


def load(path):
    path = str(path)
    if path.endswith(".jsonl"):
        return load_jsonl(path)
    if path.endswith(".npz"):
        return load_npz(path)
    raise DatasetParseError(f"unknown dataset extension: {path}")


def _header(dataset):
    return {
        "kind": _KIND,
        "version": FORMAT_VERSION,
        "obs_dim": dataset.obs_dim,
        "action_dim": dataset.action_dim,
        "n_episodes": dataset.n_episodes,
        "metadata": dataset.metadata,
    }


def _check_header(header, path):
    if header.get("kind") != _KIND:
        raise DatasetParseError(f"{path}: not a dataset file")
    if header.get("version") != FORMAT_VERSION:
        raise DatasetParseError(f"{path}: unsupported version {header.get('version')!r}")


def save_jsonl(path, dataset):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(_header(dataset)))
        fh.write("\n")
        for ep in dataset.episodes:
            fh.write(
                canonical_json(
                    {
                        "states": ep.states.tolist(),
                        "actions": ep.actions.tolist(),
                        "rewards": ep.rewards.tolist(),
                    }
                )
            )
            fh.write("\n")


def load_jsonl(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DatasetParseError(f"{path}: empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatasetParseError(f"{path}: bad header line") from exc
    _check_header(header, path)
    episodes = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            episodes.append(Episode(rec["states"], rec["actions"], rec["rewards"]))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
            raise DatasetParseError(f"{path}:{lineno}: bad episode record: {exc}") from exc
    if len(episodes) != header["n_episodes"]:
        raise DatasetParseError(
            f"{path}: header says {header['n_episodes']} episodes, found {len(episodes)}"
        )
    return _finish(episodes, header, path)


def save_npz(path, dataset):
    header = np.frombuffer(canonical_json(_header(dataset)).encode("utf-8"), dtype=np.uint8)
    write_npz(
        path,
        __header__=header,
        states=dataset.all_states(),
        actions=np.concatenate([ep.actions for ep in dataset.episodes], axis=0),
        rewards=np.concatenate([ep.rewards for ep in dataset.episodes], axis=0),
        state_offsets=dataset.state_offsets(),
    )


def load_npz(path):
    try:
        arrays = read_npz(path)
    except (OSError, ValueError) as exc:
        raise DatasetParseError(f"{path}: unreadable npz: {exc}") from exc
    for key in ("__header__", "states", "actions", "rewards", "state_offsets"):
        if key not in arrays:
            raise DatasetParseError(f"{path}: missing array {key!r}")
    try:
        header = json.loads(bytes(arrays["__header__"]).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DatasetParseError(f"{path}: corrupt header") from exc
    _check_header(header, path)

    states = arrays["states"]
    actions = arrays["actions"]
    rewards = arrays["rewards"]
    offsets = arrays["state_offsets"]
    if offsets.ndim != 1 or offsets.size < 2 or offsets[0] != 0 or offsets[-1] != len(states):
        raise DatasetParseError(f"{path}: malformed state_offsets")
    episodes = []
    a0 = 0
    for e in range(offsets.size - 1):
        lo, hi = int(offsets[e]), int(offsets[e + 1])
        n = hi - lo - 1
        try:
            episodes.append(Episode(states[lo:hi], actions[a0 : a0 + n], rewards[a0 : a0 + n]))
        except ValueError as exc:
            raise DatasetParseError(f"{path}: episode {e}: {exc}") from exc
        a0 += n
    if a0 != len(actions):
        raise DatasetParseError(f"{path}: {len(actions) - a0} actions not covered by offsets")
    return _finish(episodes, header, path)


def _finish(episodes, header, path):
    try:
        ds = Dataset(episodes, header.get("metadata", {}))
    except ValueError as exc:
        raise DatasetParseError(f"{path}: {exc}") from exc
    if ds.obs_dim != header["obs_dim"] or ds.action_dim != header["action_dim"]:
        raise DatasetParseError(f"{path}: header dims disagree with episode contents")
    return ds
