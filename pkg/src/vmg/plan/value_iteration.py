"""Value iteration over the graph MDP.

The graph's actions are its edges, so the Bellman operator is a max over
outgoing edges of reward + discount * V(dst). Sweeps are synchronous
from V = 0; sinks keep value 0. Convergence by sup-norm difference of
consecutive iterates: with contraction factor `discount`, a sweep delta
of tol bounds the Bellman residual by discount * tol.
"""

import json
from dataclasses import dataclass

import numpy as np

from .._kernels import value_sweeps
from ..errors import InvalidArgumentError, NumericFaultError, SchemaError
from ..serialize import canonical_json, read_npz, write_npz

VI_TOL = 1e-9
VI_MAX_ITERS = 10_000


@dataclass
class ValueTable:
    values: np.ndarray
    iterations: int
    converged: bool
    discount: float

    def save(self, path):
        header = {
            "kind": "vmg-values",
            "version": 1,
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "discount": float(self.discount),
        }
        write_npz(
            path,
            values=np.asarray(self.values, dtype=np.float64),
            __header__=np.frombuffer(canonical_json(header).encode(), dtype=np.uint8),
        )

    @classmethod
    def load(cls, path):
        arrays = read_npz(path)
        try:
            header = json.loads(bytes(arrays["__header__"]))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"{path}: missing or malformed value-table header") from exc
        if header.get("kind") != "vmg-values" or header.get("version") != 1:
            raise SchemaError(f"{path}: not a version-1 value table")
        return cls(
            values=arrays["values"],
            iterations=header["iterations"],
            converged=header["converged"],
            discount=header["discount"],
        )


def value_iteration(graph, discount, tol=VI_TOL, max_iters=VI_MAX_ITERS):
    if not 0.0 <= discount < 1.0:
        raise InvalidArgumentError("discount must be in [0, 1)")
    row_ptr, edge_dst, edge_rewards = graph.csr()
    values, iters, converged = value_sweeps(
        graph.n_vertices, row_ptr, edge_dst, edge_rewards, discount, tol, max_iters
    )
    if not np.all(np.isfinite(values)):
        raise NumericFaultError("value iteration produced non-finite values")
    return ValueTable(values=values, iterations=iters, converged=converged, discount=discount)
