"""Weighted CART decision tree with class-probability leaves.

Splits greedily minimize weighted Gini impurity. Candidate thresholds are
midpoints between consecutive distinct feature values of positive-weight
samples; ties in gain resolve to the lowest feature index, then the lowest
threshold, so fitting is fully deterministic. Leaves store the weighted
class frequency distribution of the samples they absorb.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MIN_GAIN = 1e-12


@dataclass
class DecisionTree:
    feature: np.ndarray  # split feature per node, -1 for leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    dist: np.ndarray  # (n_nodes, n_classes); zero rows for internal nodes
    max_depth: int
    n_features: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_classes(self) -> int:
        return self.dist.shape[1]

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.n_nodes else 0

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} feature columns, got {X.shape[1] if X.ndim == 2 else 'non-matrix'}"
            )
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = np.nonzero(feat >= 0)[0]
            if active.size == 0:
                break
            cur = node[active]
            go_left = X[active, feat[active]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        return self.dist[node]

    def predict(self, X: np.ndarray) -> np.ndarray:
        # argmax resolves probability ties to the lowest class index
        return np.argmax(self.predict_proba(X), axis=1)


@dataclass
class _Builder:
    X: np.ndarray
    y: np.ndarray
    w: np.ndarray
    n_classes: int
    max_depth: int
    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    dist: list = field(default_factory=list)

    def _add_leaf(self, class_w: np.ndarray) -> int:
        self.feature.append(-1)
        self.threshold.append(float("nan"))
        self.left.append(-1)
        self.right.append(-1)
        self.dist.append(class_w / class_w.sum())
        return len(self.feature) - 1

    def _best_split(self, idx: np.ndarray, class_w: np.ndarray, total_w: float):
        parent_gini = 1.0 - float(((class_w / total_w) ** 2).sum())
        if parent_gini <= 0.0:
            return None
        best = (0.0, -1, 0.0)  # (gain, feature, threshold)
        y_local = self.y[idx]
        w_local = self.w[idx]
        for f in range(self.X.shape[1]):
            col = self.X[idx, f]
            order = np.argsort(col, kind="mergesort")
            vals = col[order]
            boundaries = np.nonzero(vals[:-1] != vals[1:])[0]
            if boundaries.size == 0:
                continue
            onehot = np.zeros((len(idx), self.n_classes))
            onehot[np.arange(len(idx)), y_local[order]] = w_local[order]
            prefix = np.cumsum(onehot, axis=0)
            left_counts = prefix[boundaries]
            right_counts = class_w - left_counts
            wl = left_counts.sum(axis=1)
            wr = total_w - wl
            child = (
                wl
                - (left_counts**2).sum(axis=1) / wl
                + wr
                - (right_counts**2).sum(axis=1) / wr
            ) / total_w
            gains = parent_gini - child
            pos = int(np.argmax(gains))  # first max: lowest threshold wins ties
            gain = float(gains[pos])
            if gain > _MIN_GAIN and gain > best[0]:
                b = boundaries[pos]
                best = (gain, f, float((vals[b] + vals[b + 1]) / 2.0))
        return best if best[1] >= 0 else None

    def build(self, idx: np.ndarray, depth: int) -> int:
        class_w = np.bincount(self.y[idx], weights=self.w[idx], minlength=self.n_classes)
        total_w = float(class_w.sum())
        if depth >= self.max_depth:
            return self._add_leaf(class_w)
        found = self._best_split(idx, class_w, total_w)
        if found is None:
            return self._add_leaf(class_w)
        _, f, thr = found
        node = len(self.feature)
        self.feature.append(f)
        self.threshold.append(thr)
        self.left.append(-1)
        self.right.append(-1)
        self.dist.append(np.zeros(self.n_classes))
        mask = self.X[idx, f] <= thr
        self.left[node] = self.build(idx[mask], depth + 1)
        self.right[node] = self.build(idx[~mask], depth + 1)
        return node


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    max_depth: int,
    seed: int = 0,
    n_classes: int | None = None,
) -> DecisionTree:
    """Fit a weighted CART tree.

    ``seed`` is accepted for interface stability; fitting itself is
    deterministic. Zero-weight samples contribute neither to impurity nor
    to candidate thresholds.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("need at least one sample")
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if w.sum() <= 0:
        raise ValueError("weights sum to zero")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    keep = np.nonzero(w > 0)[0]
    builder = _Builder(X=X[keep], y=y[keep], w=w[keep], n_classes=n_classes, max_depth=max_depth)
    builder.build(np.arange(len(keep)), 0)
    return DecisionTree(
        feature=np.asarray(builder.feature, dtype=np.int64),
        threshold=np.asarray(builder.threshold, dtype=np.float64),
        left=np.asarray(builder.left, dtype=np.int64),
        right=np.asarray(builder.right, dtype=np.int64),
        dist=np.asarray(builder.dist, dtype=np.float64),
        max_depth=max_depth,
        n_features=X.shape[1],
    )


def tree_to_nodes(tree: DecisionTree) -> list[dict]:
    """JSON-ready node list; floats survive the round trip exactly."""
    nodes = []
    for i in range(tree.n_nodes):
        if tree.feature[i] >= 0:
            nodes.append(
                {
                    "feature": int(tree.feature[i]),
                    "threshold": float(tree.threshold[i]),
                    "left": int(tree.left[i]),
                    "right": int(tree.right[i]),
                }
            )
        else:
            nodes.append({"dist": [float(v) for v in tree.dist[i]]})
    return nodes


def tree_from_nodes(nodes: list[dict], n_features: int, n_classes: int, max_depth: int) -> DecisionTree:
    n = len(nodes)
    feature = np.full(n, -1, dtype=np.int64)
    threshold = np.full(n, np.nan)
    left = np.full(n, -1, dtype=np.int64)
    right = np.full(n, -1, dtype=np.int64)
    dist = np.zeros((n, n_classes))
    for i, node in enumerate(nodes):
        if "feature" in node:
            feature[i] = node["feature"]
            threshold[i] = node["threshold"]
            left[i] = node["left"]
            right[i] = node["right"]
        else:
            dist[i] = node["dist"]
    return DecisionTree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        dist=dist,
        max_depth=max_depth,
        n_features=n_features,
    )
