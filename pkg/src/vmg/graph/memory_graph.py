"""The graph container: vertices in feature space, reward-weighted edges."""

import json
from dataclasses import dataclass, field

import numpy as np

from .._kernels import classify_batch
from ..errors import InvalidArgumentError, SchemaError
from ..serialize import canonical_json, read_npz, write_npz

FORMAT_VERSION = 1


@dataclass
class MemoryGraph:
    gamma_m: float
    reward_mode: str
    vertex_features: np.ndarray  # (V, d)
    vertex_states: np.ndarray  # (V, obs_dim) representative raw states
    vertex_rows: np.ndarray  # (V,) rows into the dataset's stacked states
    edge_src: np.ndarray  # (E,)
    edge_dst: np.ndarray  # (E,)
    edge_rewards: np.ndarray  # (E,)
    n_env_transitions: int
    n_cross_transitions: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertex_features = np.ascontiguousarray(self.vertex_features, dtype=np.float64)
        self.vertex_states = np.ascontiguousarray(self.vertex_states, dtype=np.float64)
        self.vertex_rows = np.ascontiguousarray(self.vertex_rows, dtype=np.int64)
        self.edge_src = np.ascontiguousarray(self.edge_src, dtype=np.int64)
        self.edge_dst = np.ascontiguousarray(self.edge_dst, dtype=np.int64)
        self.edge_rewards = np.ascontiguousarray(self.edge_rewards, dtype=np.float64)
        v = self.vertex_features.shape[0]
        e = self.edge_src.shape[0]
        if self.vertex_states.shape[0] != v or self.vertex_rows.shape != (v,):
            raise InvalidArgumentError("vertex array lengths disagree")
        if self.edge_dst.shape != (e,) or self.edge_rewards.shape != (e,):
            raise InvalidArgumentError("edge array lengths disagree")
        if e:
            if self.edge_src.min() < 0 or self.edge_src.max() >= v:
                raise InvalidArgumentError("edge source out of range")
            if self.edge_dst.min() < 0 or self.edge_dst.max() >= v:
                raise InvalidArgumentError("edge target out of range")
            if np.any(self.edge_src == self.edge_dst):
                raise InvalidArgumentError("self edges are not allowed")
            order = np.lexsort((self.edge_dst, self.edge_src))
            if not np.array_equal(order, np.arange(e)):
                raise InvalidArgumentError("edges must be sorted by (src, dst)")
        self._row_ptr = np.zeros(v + 1, dtype=np.int64)
        np.add.at(self._row_ptr, self.edge_src + 1, 1)
        np.cumsum(self._row_ptr, out=self._row_ptr)

    @property
    def n_vertices(self):
        return self.vertex_features.shape[0]

    @property
    def n_edges(self):
        return self.edge_src.shape[0]

    @property
    def feature_dim(self):
        return self.vertex_features.shape[1]

    def csr(self):
        """(row_ptr, edge_dst, edge_rewards) over edges grouped by source."""
        return self._row_ptr, self.edge_dst, self.edge_rewards

    def out_edges(self, j):
        """(dst array, reward array) of vertex j's outgoing edges."""
        lo, hi = self._row_ptr[j], self._row_ptr[j + 1]
        return self.edge_dst[lo:hi], self.edge_rewards[lo:hi]

    def in_degree(self):
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.edge_dst, 1)
        return deg

    def classify(self, features):
        """Nearest vertex (squared feature distance, lowest id on ties)."""
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if features.shape[1] != self.feature_dim:
            raise InvalidArgumentError(
                f"feature dim {features.shape[1]} != graph dim {self.feature_dim}"
            )
        return classify_batch(features, self.vertex_features)

    def stats(self):
        out_deg = np.diff(self._row_ptr)
        sinks = int(np.sum(out_deg == 0))
        ratio = (
            self.n_env_transitions / self.n_cross_transitions
            if self.n_cross_transitions
            else float("inf")
        )
        return {
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_sinks": sinks,
            "n_env_transitions": self.n_env_transitions,
            "n_cross_transitions": self.n_cross_transitions,
            "transition_compression": ratio,
            "mean_out_degree": float(out_deg.mean()) if self.n_vertices else 0.0,
            "reward_min": float(self.edge_rewards.min()) if self.n_edges else 0.0,
            "reward_max": float(self.edge_rewards.max()) if self.n_edges else 0.0,
            "gamma_m": self.gamma_m,
            "reward_mode": self.reward_mode,
        }

    def save(self, path):
        header = {
            "kind": "vmg-graph",
            "version": FORMAT_VERSION,
            "gamma_m": self.gamma_m,
            "reward_mode": self.reward_mode,
            "n_env_transitions": int(self.n_env_transitions),
            "n_cross_transitions": int(self.n_cross_transitions),
            "metadata": self.metadata,
        }
        write_npz(
            path,
            __header__=np.frombuffer(canonical_json(header).encode("utf-8"), dtype=np.uint8),
            vertex_features=self.vertex_features,
            vertex_states=self.vertex_states,
            vertex_rows=self.vertex_rows,
            edge_src=self.edge_src,
            edge_dst=self.edge_dst,
            edge_rewards=self.edge_rewards,
        )

    @classmethod
    def load(cls, path):
        arrays = read_npz(path)
        if "__header__" not in arrays:
            raise SchemaError(f"{path}: not a graph file")
        try:
            header = json.loads(bytes(arrays["__header__"]).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError(f"{path}: corrupt graph header") from exc
        if header.get("kind") != "vmg-graph" or header.get("version") != FORMAT_VERSION:
            raise SchemaError(f"{path}: unsupported graph file")
        try:
            return cls(
                gamma_m=header["gamma_m"],
                reward_mode=header["reward_mode"],
                vertex_features=arrays["vertex_features"],
                vertex_states=arrays["vertex_states"],
                vertex_rows=arrays["vertex_rows"],
                edge_src=arrays["edge_src"],
                edge_dst=arrays["edge_dst"],
                edge_rewards=arrays["edge_rewards"],
                n_env_transitions=header["n_env_transitions"],
                n_cross_transitions=header["n_cross_transitions"],
                metadata=header.get("metadata", {}),
            )
        except KeyError as exc:
            raise SchemaError(f"{path}: missing graph field {exc}") from exc
