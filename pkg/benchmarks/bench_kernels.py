#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-python kernel backends.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--quick]

Each kernel runs on synthetic inputs sized like a real 20k-transition
maze run (and one size up), timed best-of-N, with both backends checked
for agreeing results before timing.
"""

import argparse
import time

import numpy as np

from vmg._kernels import _core_backends


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _random_csr(rng, n_vertices, n_edges):
    src = rng.integers(0, n_vertices, size=n_edges)
    dst = rng.integers(0, n_vertices, size=n_edges)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    rewards = rng.random(len(src))
    row_ptr = np.zeros(n_vertices + 1, dtype=np.int64)
    np.add.at(row_ptr, src + 1, 1)
    row_ptr = np.cumsum(row_ptr)
    return row_ptr, np.ascontiguousarray(dst), np.ascontiguousarray(rewards)


def bench(quick=False):
    backends = _core_backends()
    if len(backends) == 1:
        print("note: compiled backend unavailable; timing python only")
    repeats = 3 if quick else 5
    rng = np.random.default_rng(0)

    rows = []

    sizes = [(20_000, 10), (60_000, 10)] if not quick else [(20_000, 10)]
    for n, d in sizes:
        # clustered like trained-encoder output, so the merge threshold bites
        centers = rng.normal(size=(n // 25, d)) * 4.0
        feats = centers[rng.integers(0, len(centers), size=n)]
        feats = feats + rng.normal(size=(n, d)) * 0.15
        results = {}
        for name, mod in backends.items():
            results[name] = mod.greedy_merge(feats, 0.8)
        if len(results) == 2:
            np.testing.assert_array_equal(results["python"], results["compiled"])
        times = {
            name: _time(lambda m=mod: m.greedy_merge(feats, 0.8), repeats)
            for name, mod in backends.items()
        }
        rows.append((f"greedy_merge    n={n:>6} d={d}", times))

        verts = feats[results["python"]]
        classify = {}
        for name, mod in backends.items():
            classify[name] = mod.classify_batch(feats, verts)
        if len(classify) == 2:
            np.testing.assert_array_equal(classify["python"], classify["compiled"])
        times = {
            name: _time(lambda m=mod: m.classify_batch(feats, verts), repeats)
            for name, mod in backends.items()
        }
        rows.append((f"classify_batch  n={n:>6} V={len(verts)}", times))

    vi_sizes = [(25_000, 8), (100_000, 8)] if not quick else [(25_000, 8)]
    for n_vertices, deg in vi_sizes:
        row_ptr, dst, rewards = _random_csr(rng, n_vertices, n_vertices * deg)
        values = {}
        for name, mod in backends.items():
            values[name] = mod.value_sweeps(n_vertices, row_ptr, dst, rewards, 0.8, 1e-9, 10_000)[0]
        if len(values) == 2:
            np.testing.assert_allclose(values["python"], values["compiled"], atol=1e-12)
        times = {
            name: _time(
                lambda m=mod: m.value_sweeps(n_vertices, row_ptr, dst, rewards, 0.8, 1e-9, 10_000),
                repeats,
            )
            for name, mod in backends.items()
        }
        rows.append((f"value_sweeps    V={n_vertices:>6} E={len(dst)}", times))

    width = max(len(label) for label, _ in rows)
    names = list(backends)
    header = f"{'kernel'.ljust(width)}  " + "  ".join(f"{n:>10}" for n in names)
    if len(names) == 2:
        header += "   speedup"
    print(header)
    print("-" * len(header))
    for label, times in rows:
        line = label.ljust(width) + "  " + "  ".join(f"{times[n] * 1e3:9.1f}ms" for n in names)
        if len(names) == 2 and times["compiled"] > 0:
            line += f"   {times['python'] / times['compiled']:6.1f}x"
        print(line)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="fewer sizes and repeats")
    bench(quick=parser.parse_args().quick)
