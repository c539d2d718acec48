"""2-D projection of a graph for inspection.

PCA via SVD on centered vertex features; coordinates plus the edge list
go to a JSON file any plotting tool can consume. Sign convention: each
principal axis is flipped so its largest-magnitude loading is positive,
which keeps the output stable across BLAS builds.
"""

import numpy as np

from ..errors import InvalidArgumentError
from ..serialize import write_json


def project_vertices(graph, n_components=2):
    x = graph.vertex_features
    if x.shape[0] < 1:
        raise InvalidArgumentError("graph has no vertices")
    k = min(n_components, x.shape[1])
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    axes = vt[:k]
    flip = np.sign(axes[np.arange(k), np.argmax(np.abs(axes), axis=1)])
    axes = axes * flip[:, None]
    coords = centered @ axes.T
    if k < n_components:
        coords = np.pad(coords, ((0, 0), (0, n_components - k)))
    return coords


def export_layout(graph, path):
    coords = project_vertices(graph)
    write_json(
        path,
        {
            "vertices": [
                {"id": i, "x": float(coords[i, 0]), "y": float(coords[i, 1])}
                for i in range(graph.n_vertices)
            ],
            "edges": [
                {
                    "src": int(s),
                    "dst": int(d),
                    "reward": float(r),
                }
                for s, d, r in zip(graph.edge_src, graph.edge_dst, graph.edge_rewards)
            ],
            "stats": {
                k: v for k, v in graph.stats().items() if not isinstance(v, float) or np.isfinite(v)
            },
        },
    )
    return coords
