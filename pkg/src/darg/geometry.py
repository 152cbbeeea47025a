"""Neighbor graphs and the mutual-neighbor density factor.

A pair of samples are mutual nearest neighbors when each appears in the
other's k-nearest-neighbor list. The density factor rescales the mutual
neighbor counts to [0, 1]: 1 marks the densest region, 0 the most isolated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NeighborGraph:
    k: int
    adjacency: tuple[tuple[int, ...], ...]
    mutual: bool

    @property
    def n_samples(self) -> int:
        return len(self.adjacency)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency)


@dataclass(frozen=True)
class DensityProfile:
    counts: np.ndarray
    rho: np.ndarray


def _pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    # Row-wise differences keep the matrix exactly symmetric and give exact
    # zeros for duplicate points, which the index tie rule relies on.
    n = X.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        diff = X - X[i]
        out[i] = np.einsum("ij,ij->i", diff, diff)
    return out


def knn_graph(X: np.ndarray, k: int) -> NeighborGraph:
    """Directed k-nearest-neighbor graph under the Euclidean metric.

    Neighbors are ordered by ascending distance, ties broken by ascending
    sample index; self is excluded and k is clamped to n_samples - 1.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least two samples to build a neighbor graph")
    if k < 1:
        raise ValueError("k must be at least 1")
    n = X.shape[0]
    k_eff = min(k, n - 1)
    d2 = _pairwise_sq_dists(X)
    np.fill_diagonal(d2, np.inf)
    indices = np.arange(n)
    adjacency = []
    for i in range(n):
        order = np.lexsort((indices, d2[i]))
        adjacency.append(tuple(int(j) for j in order[:k_eff]))
    return NeighborGraph(k=k, adjacency=tuple(adjacency), mutual=False)


def mutual_graph(g: NeighborGraph) -> NeighborGraph:
    """Keep only edges present in both directions; adjacency becomes symmetric."""
    if g.mutual:
        raise ValueError("graph is already mutual")
    neighbor_sets = [set(a) for a in g.adjacency]
    adjacency = tuple(
        tuple(sorted(j for j in g.adjacency[i] if i in neighbor_sets[j]))
        for i in range(g.n_samples)
    )
    return NeighborGraph(k=g.k, adjacency=adjacency, mutual=True)


def _normalize_counts(counts: np.ndarray) -> np.ndarray:
    lo = counts.min()
    hi = counts.max()
    if hi == lo:
        # Uniformly connected data reads as uniformly dense; the downstream
        # weight dampener then becomes a no-op.
        return np.ones_like(counts, dtype=np.float64)
    return (counts - lo) / float(hi - lo)


def density_factor(g: NeighborGraph) -> DensityProfile:
    """Min-max normalized mutual-neighbor counts."""
    if not g.mutual:
        raise ValueError("density factor requires a mutual graph")
    counts = np.array([len(a) for a in g.adjacency], dtype=np.int64)
    return DensityProfile(counts=counts, rho=_normalize_counts(counts))


def mutual_counts(X: np.ndarray, k: int) -> np.ndarray:
    """Mutual-neighbor count per sample (directed graph intersected both ways)."""
    g = mutual_graph(knn_graph(X, k))
    return np.array([len(a) for a in g.adjacency], dtype=np.int64)


def compute_density(
    X: np.ndarray, labels: np.ndarray | None, k: int, scope: str = "within_class"
) -> DensityProfile:
    """Density profile over a labeled sample set.

    With ``scope="within_class"`` neighbor search runs inside each class
    (a minority point stranded in another class's territory keeps a low
    count); ``scope="global"`` searches across all samples. Normalization
    is always global so the factors share one scale.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    if scope == "global" or labels is None:
        if n >= 2:
            counts = mutual_counts(X, k)
    elif scope == "within_class":
        labels = np.asarray(labels)
        for cls in np.unique(labels):
            idx = np.nonzero(labels == cls)[0]
            if len(idx) >= 2:
                counts[idx] = mutual_counts(X[idx], k)
            # a singleton class keeps count 0: nothing to be mutual with
    else:
        raise ValueError(f"unknown neighbor scope {scope!r}")
    return DensityProfile(counts=counts, rho=_normalize_counts(counts))
