"""Seeded Lloyd k-means with k-means++ init, used by the IVF and PQ trainers.

Deterministic for a fixed generator: ties in assignment go to the lowest
centroid index, and empty clusters are re-seeded from the farthest point of
the largest cluster.
"""

from __future__ import annotations

import numpy as np

DEFAULT_ITERS = 25


def _sq_norms(x: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", x, x)


def kmeans_pp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each next center sampled proportional to squared
    distance from the chosen set."""
    n = data.shape[0]
    data64 = data.astype(np.float64)
    norms = _sq_norms(data64)
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = norms + norms[chosen[0]] - 2.0 * (data64 @ data64[chosen[0]])
    np.maximum(d2, 0.0, out=d2)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with a chosen center
            remaining = np.setdiff1d(np.arange(n), chosen[:i], assume_unique=False)
            chosen[i] = remaining[0] if len(remaining) else chosen[0]
        else:
            r = rng.random() * total
            chosen[i] = min(int(np.searchsorted(np.cumsum(d2), r)), n - 1)
        cand = norms + norms[chosen[i]] - 2.0 * (data64 @ data64[chosen[i]])
        np.maximum(cand, 0.0, out=cand)
        np.minimum(d2, cand, out=d2)
    return data[chosen].copy()


def assign_to_centroids(data: np.ndarray, centroids: np.ndarray, chunk: int = 16384) -> np.ndarray:
    """Nearest centroid per row by squared L2; ties go to the lowest index."""
    cn = _sq_norms(centroids.astype(np.float64)).astype(np.float32)
    out = np.empty(data.shape[0], dtype=np.int64)
    for start in range(0, data.shape[0], chunk):
        block = data[start : start + chunk]
        # ||x||^2 is constant per row, so cn - 2 x.c orders the same as the distance
        proxy = cn[None, :] - 2.0 * (block @ centroids.T)
        out[start : start + chunk] = np.argmin(proxy, axis=1)
    return out


def kmeans(
    data: np.ndarray, k: int, rng: np.random.Generator, iters: int = DEFAULT_ITERS
) -> tuple[np.ndarray, np.ndarray]:
    """Train k centroids over data rows; returns (centroids, assignments).

    Requires 1 <= k <= len(data).
    """
    n, d = data.shape
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    data = np.ascontiguousarray(data, dtype=np.float32)
    centroids = kmeans_pp_init(data, k, rng).astype(np.float32)
    assign = assign_to_centroids(data, centroids)
    for _ in range(iters):
        counts = np.bincount(assign, minlength=k)
        # per-dimension weighted bincount beats np.add.at by orders of magnitude
        sums = np.empty((k, d), dtype=np.float64)
        for j in range(d):
            sums[:, j] = np.bincount(assign, weights=data[:, j], minlength=k)
        nonzero = counts > 0
        centroids[nonzero] = (sums[nonzero] / counts[nonzero, None]).astype(np.float32)
        for empty in np.flatnonzero(counts == 0):
            donor = int(np.argmax(counts))
            members = np.flatnonzero(assign == donor)
            gaps = _sq_norms(data[members] - centroids[donor])
            steal = members[int(np.argmax(gaps))]
            centroids[empty] = data[steal]
            assign[steal] = empty
            counts[donor] -= 1
            counts[empty] += 1
        new_assign = assign_to_centroids(data, centroids)
        if np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
    return centroids, assign
