"""Minimal reverse-mode autodiff over float64 numpy arrays.

A forward pass builds a graph of Tensor nodes; backward() on a scalar loss
walks it in reverse topological order. This is all the machinery the dense
3-layer MLPs and their training losses need: no broadcasting tricks beyond
bias addition, no views, no in-place ops.
"""

import numpy as np

from vmg.errors import InvalidArgumentError


class Tensor:
    __slots__ = ("data", "grad", "_parents", "_backward")

    def __init__(self, data, parents=(), backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"


def _accum(t, g):
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def backward(loss):
    """Populate .grad on every tensor contributing to the scalar loss."""
    if loss.data.size != 1:
        raise InvalidArgumentError(f"loss must be scalar, got shape {loss.data.shape}")
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            stack.append((p, False))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)
    return loss


# ---- ops -------------------------------------------------------------------


def matmul(a, b):
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise InvalidArgumentError(f"matmul: {a.data.shape} @ {b.data.shape}")
    out = Tensor(a.data @ b.data, (a, b))

    def _bw(g):
        _accum(a, g @ b.data.T)
        _accum(b, a.data.T @ g)

    out._backward = _bw
    return out


def add_bias(x, b):
    """(N, d) + (d,), the only broadcasting add the engine supports."""
    if b.data.ndim != 1 or x.data.shape[-1] != b.data.shape[0]:
        raise InvalidArgumentError(f"add_bias: {x.data.shape} + {b.data.shape}")
    out = Tensor(x.data + b.data, (x, b))

    def _bw(g):
        _accum(x, g)
        _accum(b, g.sum(axis=0) if g.ndim > b.data.ndim else g)

    out._backward = _bw
    return out


def add(a, b):
    if a.data.shape != b.data.shape:
        raise InvalidArgumentError(f"add shape mismatch: {a.shape} vs {b.shape}")
    out = Tensor(a.data + b.data, (a, b))

    def _bw(g):
        _accum(a, g)
        _accum(b, g)

    out._backward = _bw
    return out


def sub(a, b):
    if a.data.shape != b.data.shape:
        raise InvalidArgumentError(f"sub shape mismatch: {a.shape} vs {b.shape}")
    out = Tensor(a.data - b.data, (a, b))

    def _bw(g):
        _accum(a, g)
        _accum(b, -g)

    out._backward = _bw
    return out


def sub_const(a, c):
    out = Tensor(a.data - c, (a,))
    out._backward = lambda g: _accum(a, g)
    return out


def rsub_const(c, a):
    out = Tensor(c - a.data, (a,))
    out._backward = lambda g: _accum(a, -g)
    return out


def mul_const(a, c):
    c = np.asarray(c, dtype=np.float64)
    out = Tensor(a.data * c, (a,))
    out._backward = lambda g: _accum(a, g * c)
    return out


def relu(x):
    out = Tensor(np.maximum(x.data, 0.0), (x,))
    out._backward = lambda g: _accum(x, g * (x.data > 0.0))
    return out


def square(x):
    out = Tensor(x.data * x.data, (x,))
    out._backward = lambda g: _accum(x, 2.0 * x.data * g)
    return out


def sqrt(x):
    root = np.sqrt(x.data)
    out = Tensor(root, (x,))

    def _bw(g):
        # Subgradient 0 at x == 0 keeps hinge-on-norm losses NaN-free.
        safe = np.where(root > 0.0, root, 1.0)
        _accum(x, np.where(root > 0.0, 0.5 * g / safe, 0.0))

    out._backward = _bw
    return out


def tsum(x, axis=None):
    out = Tensor(x.data.sum(axis=axis), (x,))

    def _bw(g):
        if axis is None:
            _accum(x, np.broadcast_to(g, x.data.shape).copy())
        else:
            _accum(x, np.broadcast_to(np.expand_dims(g, axis), x.data.shape).copy())

    out._backward = _bw
    return out


def mean(x, axis=None):
    n = x.data.size if axis is None else x.data.shape[axis]
    return mul_const(tsum(x, axis=axis), 1.0 / n)


def concat_cols(a, b):
    """Concatenate two (N, *) blocks along axis 1."""
    out = Tensor(np.concatenate([a.data, b.data], axis=1), (a, b))
    na = a.data.shape[1]

    def _bw(g):
        _accum(a, g[:, :na])
        _accum(b, g[:, na:])

    out._backward = _bw
    return out


def pairwise_sqdist(a, b):
    """out[i, j] = ||a[i] - b[j]||^2 for (N, d) and (M, d) inputs."""
    diff = a.data[:, None, :] - b.data[None, :, :]
    out = Tensor((diff * diff).sum(axis=2), (a, b))

    def _bw(g):
        _accum(a, 2.0 * np.einsum("ij,ijk->ik", g, diff))
        _accum(b, -2.0 * np.einsum("ij,ijk->jk", g, diff))

    out._backward = _bw
    return out
