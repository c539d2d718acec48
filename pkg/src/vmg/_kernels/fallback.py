"""Pure-numpy versions of the compiled kernels.

Used when the Cython extension is unavailable or VMG_PURE_PYTHON=1.
Semantics must match vmg._kernels._core; the parity tests compare both.
"""

import numpy as np


def greedy_merge(feats, gamma_m):
    thresh = gamma_m * gamma_m
    n = feats.shape[0]
    vidx = []
    verts = np.empty((0, feats.shape[1]))
    for i in range(n):
        if len(vidx):
            d2 = ((verts[: len(vidx)] - feats[i]) ** 2).sum(axis=1)
            if d2.min() <= thresh:
                continue
        if len(vidx) == verts.shape[0]:
            grown = np.empty((max(16, 2 * verts.shape[0]), feats.shape[1]))
            grown[: len(vidx)] = verts[: len(vidx)]
            verts = grown
        verts[len(vidx)] = feats[i]
        vidx.append(i)
    return np.asarray(vidx, dtype=np.int64)


def classify_batch(feats, verts, block=2048):
    if verts.shape[0] == 0:
        raise ValueError("empty vertex set")
    out = np.empty(feats.shape[0], dtype=np.int64)
    for lo in range(0, feats.shape[0], block):
        chunk = feats[lo : lo + block]
        d2 = ((chunk[:, None, :] - verts[None, :, :]) ** 2).sum(axis=2)
        out[lo : lo + block] = np.argmin(d2, axis=1)  # argmin keeps lowest id on ties
    return out


def value_sweeps(n_vertices, row_ptr, edge_dst, edge_reward, discount, tol, max_iters):
    v = np.zeros(n_vertices)
    has_out = row_ptr[1:] > row_ptr[:-1]
    starts = row_ptr[:-1][has_out]
    converged = False
    iters = 0
    for it in range(max_iters):
        vn = np.zeros(n_vertices)
        if starts.size:
            cand = edge_reward + discount * v[edge_dst]
            vn[has_out] = np.maximum.reduceat(cand, starts)
        resid = np.abs(vn - v).max() if n_vertices else 0.0
        v = vn
        iters = it + 1
        if resid <= tol:
            converged = True
            break
    return v, iters, converged
