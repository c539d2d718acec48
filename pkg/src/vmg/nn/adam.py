"""Adam with bias correction."""

import numpy as np

from vmg.errors import InvalidArgumentError, NumericFaultError


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, names=None):
        if lr <= 0:
            raise InvalidArgumentError("learning_rate must be > 0")
        self.params = list(params)
        self.names = list(names) if names else [f"param{i}" for i in range(len(self.params))]
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self, grads=None):
        """One update from explicit grads or from each param's .grad (zeros if unset)."""
        if grads is None:
            grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in self.params]
        if len(grads) != len(self.params):
            raise InvalidArgumentError("grads/params length mismatch")
        for name, p, g in zip(self.names, self.params, grads):
            if g.shape != p.data.shape:
                raise InvalidArgumentError(f"grad shape mismatch for {name}")
            if not np.all(np.isfinite(g)):
                raise NumericFaultError(f"non-finite gradient in {name}")
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p.data -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def state_arrays(self):
        """Flat view of the optimizer state for checkpointing."""
        return {"m": self.m, "v": self.v, "t": self.t}

    def load_state(self, m, v, t):
        if len(m) != len(self.params) or len(v) != len(self.params):
            raise InvalidArgumentError("optimizer state length mismatch")
        self.m = [np.array(a, dtype=np.float64) for a in m]
        self.v = [np.array(a, dtype=np.float64) for a in v]
        self.t = int(t)
