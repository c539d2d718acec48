"""Dense MLPs: ReLU hidden layers, identity output."""

import numpy as np

from vmg.errors import InvalidArgumentError
from vmg.nn import autodiff as ad

HIDDEN_WIDTH = 256


class Mlp:
    """Stack of affine layers; ReLU between layers, identity at the output.

    Parameters live in leaf Tensors so one instance can be both trained
    (forward builds a graph) and queried cheaply (forward_array skips it).
    """

    def __init__(self, weights, biases):
        if len(weights) != len(biases) or not weights:
            raise InvalidArgumentError("weights/biases length mismatch")
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise InvalidArgumentError(f"layer {i}: bias {b.shape} does not fit weight {w.shape}")
        for i in range(len(weights) - 1):
            if weights[i].shape[1] != weights[i + 1].shape[0]:
                raise InvalidArgumentError(
                    f"layer {i} output dim {weights[i].shape[1]} != "
                    f"layer {i + 1} input dim {weights[i + 1].shape[0]}"
                )
        self.weights = [ad.Tensor(w) for w in weights]
        self.biases = [ad.Tensor(b) for b in biases]

    @classmethod
    def create(cls, sizes, rng):
        """Seeded init, uniform in +-sqrt(1/fan_in) per layer."""
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = np.sqrt(1.0 / fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases)

    @classmethod
    def default(cls, in_dim, out_dim, rng):
        """The standard 3-layer / 256-wide shape used by every model here."""
        return cls.create([in_dim, HIDDEN_WIDTH, HIDDEN_WIDTH, out_dim], rng)

    @property
    def in_dim(self):
        return self.weights[0].data.shape[0]

    @property
    def out_dim(self):
        return self.weights[-1].data.shape[1]

    def sizes(self):
        return [self.in_dim] + [w.data.shape[1] for w in self.weights]

    def params(self):
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def param_arrays(self):
        return [p.data for p in self.params()]

    def __call__(self, x):
        """Forward through a Tensor, recording the graph. x: Tensor (N, in_dim)."""
        if x.data.ndim != 2 or x.data.shape[1] != self.in_dim:
            raise InvalidArgumentError(
                f"expected input (N, {self.in_dim}), got {x.data.shape}"
            )
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = ad.add_bias(ad.matmul(h, w), b)
            if i < last:
                h = ad.relu(h)
        return h

    def forward_array(self, x):
        """Inference path: plain ndarray in/out, no graph. Accepts (d,) or (N, d)."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.in_dim:
            raise InvalidArgumentError(
                f"expected input dim {self.in_dim}, got {x.shape[1]}"
            )
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.data + b.data
            if i < last:
                h = np.maximum(h, 0.0)
        return h[0] if single else h

    def zero_grad(self):
        for p in self.params():
            p.grad = None

    def copy(self):
        return Mlp([w.data.copy() for w in self.weights], [b.data.copy() for b in self.biases])
