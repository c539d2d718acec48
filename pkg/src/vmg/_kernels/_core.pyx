# cython: language_level=3
"""Compiled hot loops: greedy vertex merging, nearest-vertex classification,
and value-iteration sweeps. Semantics mirror vmg._kernels.fallback exactly;
keep the two in sync."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def greedy_merge(double[:, ::1] feats, double gamma_m):
    """Single greedy pass over feature rows in order.

    Row i becomes a new vertex iff the vertex set is empty or its squared
    distance to every existing vertex exceeds gamma_m**2. Returns the row
    indices that became vertices (int64).
    """
    cdef Py_ssize_t n = feats.shape[0]
    cdef Py_ssize_t d = feats.shape[1]
    cdef double thresh = gamma_m * gamma_m
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long long[::1] vidx = out
    cdef Py_ssize_t nv = 0
    cdef Py_ssize_t i, j, k
    cdef double d2, diff
    cdef bint merged
    for i in range(n):
        merged = False
        for j in range(nv):
            d2 = 0.0
            for k in range(d):
                diff = feats[i, k] - feats[vidx[j], k]
                d2 += diff * diff
            if d2 <= thresh:
                merged = True
                break
        if not merged:
            vidx[nv] = i
            nv += 1
    return out[:nv].copy()


def classify_batch(double[:, ::1] feats, double[:, ::1] verts):
    """Nearest vertex (squared L2) per feature row; ties go to the lowest id."""
    cdef Py_ssize_t n = feats.shape[0]
    cdef Py_ssize_t nv = verts.shape[0]
    cdef Py_ssize_t d = feats.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long long[::1] res = out
    cdef Py_ssize_t i, j, k, best
    cdef double d2, diff, best_d2
    if nv == 0:
        raise ValueError("empty vertex set")
    for i in range(n):
        best = 0
        best_d2 = 0.0
        for k in range(d):
            diff = feats[i, k] - verts[0, k]
            best_d2 += diff * diff
        for j in range(1, nv):
            d2 = 0.0
            for k in range(d):
                diff = feats[i, k] - verts[j, k]
                d2 += diff * diff
                if d2 >= best_d2:
                    break
            if d2 < best_d2:
                best_d2 = d2
                best = j
        res[i] = best
    return out


def value_sweeps(Py_ssize_t n_vertices,
                 long long[::1] row_ptr,
                 long long[::1] edge_dst,
                 double[::1] edge_reward,
                 double discount,
                 double tol,
                 Py_ssize_t max_iters):
    """Synchronous Bellman backups until the sup-norm update is <= tol.

    Edges must be grouped by source vertex: row_ptr has n_vertices+1 entries
    delimiting each vertex's outgoing edges. Vertices with no outgoing edges
    stay at value 0. Returns (values, iterations_run, converged).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_arr = np.zeros(n_vertices)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vn_arr = np.zeros(n_vertices)
    cdef double[::1] v = v_arr
    cdef double[::1] vn = vn_arr
    cdef Py_ssize_t it, s, e
    cdef double best, cand, resid, diff
    cdef bint converged = False
    cdef Py_ssize_t iters = 0
    for it in range(max_iters):
        resid = 0.0
        for s in range(n_vertices):
            if row_ptr[s] == row_ptr[s + 1]:
                vn[s] = 0.0
            else:
                best = edge_reward[row_ptr[s]] + discount * v[edge_dst[row_ptr[s]]]
                for e in range(row_ptr[s] + 1, row_ptr[s + 1]):
                    cand = edge_reward[e] + discount * v[edge_dst[e]]
                    if cand > best:
                        best = cand
                vn[s] = best
            diff = vn[s] - v[s]
            if diff < 0:
                diff = -diff
            if diff > resid:
                resid = diff
        v, vn = vn, v
        v_arr, vn_arr = vn_arr, v_arr
        iters = it + 1
        if resid <= tol:
            converged = True
            break
    return v_arr.copy(), iters, converged
