import numpy as np

def greedy_merge(feats: np.ndarray, gamma_m: float) -> np.ndarray: ...
def classify_batch(feats: np.ndarray, verts: np.ndarray) -> np.ndarray: ...
def value_sweeps(
    n_vertices: int,
    row_ptr: np.ndarray,
    edge_dst: np.ndarray,
    edge_reward: np.ndarray,
    discount: float,
    tol: float,
    max_iters: int,
) -> tuple[np.ndarray, int, bool]: ...
