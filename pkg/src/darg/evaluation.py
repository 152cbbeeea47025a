"""Multiclass metrics, stratified cross-validation, and random search."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .boosting import DargConfig, fit_darg, predict_ensemble
from .data import Dataset


@dataclass
class MetricsReport:
    accuracy: float
    weighted_f1: float
    g_mean: float
    auc: float
    confusion: np.ndarray
    per_class_recall: np.ndarray

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "g_mean": self.g_mean,
            "auc": self.auc,
            "confusion": self.confusion.tolist(),
            "per_class_recall": [float(r) for r in self.per_class_recall],
        }


def _midranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their rank range."""
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x))
    sx = x[order]
    i = 0
    n = len(x)
    while i < n:
        j = i
        while j + 1 < n and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _rank_auc(score: np.ndarray, positive: np.ndarray) -> float:
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    ranks = _midranks(score)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray, scores: np.ndarray) -> MetricsReport:
    """Accuracy, support-weighted F1, G-Mean, and macro one-vs-rest AUC.

    Per-class F1 with no true and no predicted positives counts as 0; the
    G-Mean multiplies recalls only over classes present in the truth, and a
    single zero recall collapses it to 0. AUC uses midranks for ties, and
    classes without both a positive and a negative example are excluded
    from the macro average (0.5 if none qualify).
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise ValueError("truth and prediction vectors differ in length")
    if scores.ndim != 2 or scores.shape[0] != y_true.shape[0]:
        raise ValueError("score matrix shape does not match labels")
    if not np.all(np.abs(scores.sum(axis=1) - 1.0) <= 1e-6):
        raise ValueError("score rows must sum to 1")  # also catches NaN rows
    n, c = scores.shape
    if y_true.max() >= c or y_pred.max() >= c:
        raise ValueError("label index exceeds score columns")

    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (y_true, y_pred), 1)
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    diag = np.diag(confusion).astype(np.float64)

    accuracy = float(diag.sum() / n)

    recall = np.divide(diag, support, out=np.zeros(c), where=support > 0)
    precision = np.divide(diag, predicted, out=np.zeros(c), where=predicted > 0)
    pr = precision + recall
    f1 = np.divide(2.0 * precision * recall, pr, out=np.zeros(c), where=pr > 0)
    present = support > 0
    weighted_f1 = float((f1[present] * support[present]).sum() / n)

    recalls_present = recall[present]
    if np.any(recalls_present == 0.0):
        g_mean = 0.0
    else:
        g_mean = float(np.exp(np.log(recalls_present).mean()))

    aucs = []
    for k in range(c):
        positive = y_true == k
        n_pos = int(positive.sum())
        if n_pos == 0 or n_pos == n:
            continue
        aucs.append(_rank_auc(scores[:, k], positive))
    auc = float(np.mean(aucs)) if aucs else 0.5

    return MetricsReport(
        accuracy=accuracy,
        weighted_f1=weighted_f1,
        g_mean=g_mean,
        auc=auc,
        confusion=confusion,
        per_class_recall=recall,
    )


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


def stratified_fold_indices(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Deterministic per-sample fold assignment, stratified by class."""
    if folds < 2:
        raise ValueError("need at least two folds")
    labels = np.asarray(labels)
    assignment = np.empty(len(labels), dtype=np.int64)
    rng = np.random.default_rng(seed)
    for cls in np.unique(labels):
        members = np.nonzero(labels == cls)[0]
        if len(members) < folds:
            warnings.warn(
                f"class {cls} has {len(members)} samples for {folds} folds; "
                "stratification is best-effort",
                stacklevel=2,
            )
        shuffled = members[rng.permutation(len(members))]
        assignment[shuffled] = np.arange(len(members)) % folds
    return assignment


def cross_validate(
    ds: Dataset, cfg: DargConfig, folds: int = 5, seed: int = 0
) -> list[MetricsReport]:
    """Fit on each train split and score the held-out fold."""
    assignment = stratified_fold_indices(ds.labels, folds, seed)
    results = []
    for f in range(folds):
        test_idx = np.nonzero(assignment == f)[0]
        train_idx = np.nonzero(assignment != f)[0]
        model = fit_darg(ds.subset(train_idx), cfg)
        test = ds.subset(test_idx)
        pred, scores = predict_ensemble(model, test.features)
        results.append(compute_metrics(test.labels, pred, scores))
    return results


# ---------------------------------------------------------------------------
# Random hyperparameter search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchSpace:
    k_range: tuple[int, int] = (2, 20)
    max_depth_range: tuple[int, int] = (1, 50)
    density_thresholds: tuple[float, ...] = tuple(round(0.10 + 0.05 * i, 2) for i in range(17))

    def validate(self) -> "SearchSpace":
        if self.k_range[0] > self.k_range[1] or self.max_depth_range[0] > self.max_depth_range[1]:
            raise ValueError("empty integer range in search space")
        if not self.density_thresholds:
            raise ValueError("no density thresholds to sample")
        return self


def random_search(
    ds: Dataset,
    base_cfg: DargConfig,
    space: SearchSpace,
    iters: int,
    seed: int,
    folds: int = 5,
):
    """Uniform random draws from the search space, scored by mean CV weighted F1.

    Returns ``(best_config, trials)`` where each trial records the sampled
    hyperparameters and the fold scores. Ties keep the earliest trial.
    """
    space.validate()
    if iters < 1:
        raise ValueError("need at least one search iteration")
    rng = np.random.default_rng(seed)
    best_cfg = None
    best_score = -np.inf
    trials = []
    for i in range(iters):
        cfg = replace(
            base_cfg,
            k=int(rng.integers(space.k_range[0], space.k_range[1] + 1)),
            max_depth=int(rng.integers(space.max_depth_range[0], space.max_depth_range[1] + 1)),
            density_threshold=float(
                space.density_thresholds[rng.integers(len(space.density_thresholds))]
            ),
        )
        reports = cross_validate(ds, cfg, folds=folds, seed=seed)
        fold_scores = [r.weighted_f1 for r in reports]
        mean_score = float(np.mean(fold_scores))
        trials.append(
            {
                "iteration": i,
                "k": cfg.k,
                "max_depth": cfg.max_depth,
                "density_threshold": cfg.density_threshold,
                "mean_weighted_f1": mean_score,
                "fold_weighted_f1": fold_scores,
            }
        )
        if mean_score > best_score:
            best_score = mean_score
            best_cfg = cfg
    return best_cfg, trials
