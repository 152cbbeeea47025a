"""Density-aware, region-guided boosting and the vanilla AdaBoost baseline.

Each epoch fits a weighted tree, measures per-sample density and hardness
on the current (possibly augmented) training set, computes the learner's
voting weight, applies the noise-resistant weight update, and hands the
epoch's share of the oversampling budget to the dynamic sampler. The
density/confidence dampener exp(-delta * (1 - rho)) shrinks the weight of
isolated hard samples (likely noise) while leaving dense-region samples
untouched; disabling both factors and the sampler recovers classic
AdaBoost exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .data import Dataset, ScalerParams, apply_scaler, fit_scaler
from .geometry import compute_density
from .hardness import classification_hardness, confidence_factor
from .sampling import EpochSamplingReport, dynamic_sample_epoch, scheduler_weights
from .tree import DecisionTree, fit_tree, tree_from_nodes, tree_to_nodes

MODEL_SCHEMA = "darg-model/1"

_EPS_FLOOR = 1e-10

BETA_MODES = ("classic", "regularized")
NEIGHBOR_SCOPES = ("within_class", "global")


@dataclass(frozen=True)
class DargConfig:
    n_estimators: int = 50
    k: int = 5
    density_threshold: float = 0.5
    max_depth: int = 10
    seed: int = 0
    beta_mode: str = "classic"
    samme_correction: bool = False
    neighbor_scope: str = "within_class"
    use_density: bool = True
    use_confidence: bool = True
    use_sampling: bool = True
    gmm_max_components: int = 10

    def validate(self) -> "DargConfig":
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be positive")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0.0 < self.density_threshold < 1.0:
            raise ValueError("density_threshold must lie in (0, 1)")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if self.beta_mode not in BETA_MODES:
            raise ValueError(f"beta_mode must be one of {BETA_MODES}")
        if self.neighbor_scope not in NEIGHBOR_SCOPES:
            raise ValueError(f"neighbor_scope must be one of {NEIGHBOR_SCOPES}")
        if self.gmm_max_components < 1:
            raise ValueError("gmm_max_components must be positive")
        return self


@dataclass
class DargEnsemble:
    trees: list[DecisionTree]
    betas: list[float]
    scaler: ScalerParams
    class_names: tuple[str, ...]
    config: DargConfig

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def to_json_dict(self) -> dict:
        return {
            "schema": MODEL_SCHEMA,
            "config": asdict(self.config),
            "scaler": {
                "means": [float(v) for v in self.scaler.means],
                "std_devs": [float(v) for v in self.scaler.std_devs],
            },
            "class_names": list(self.class_names),
            "trees": [tree_to_nodes(t) for t in self.trees],
            "betas": [float(b) for b in self.betas],
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DargEnsemble":
        if doc.get("schema") != MODEL_SCHEMA:
            raise ValueError(f"unsupported model schema {doc.get('schema')!r}")
        config = DargConfig(**doc["config"])
        scaler = ScalerParams(
            means=np.asarray(doc["scaler"]["means"], dtype=np.float64),
            std_devs=np.asarray(doc["scaler"]["std_devs"], dtype=np.float64),
        )
        n_features = len(doc["scaler"]["means"])
        n_classes = len(doc["class_names"])
        trees = [
            tree_from_nodes(nodes, n_features, n_classes, config.max_depth)
            for nodes in doc["trees"]
        ]
        return cls(
            trees=trees,
            betas=[float(b) for b in doc["betas"]],
            scaler=scaler,
            class_names=tuple(doc["class_names"]),
            config=config,
        )

    @classmethod
    def load(cls, path) -> "DargEnsemble":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Epoch-level primitives
# ---------------------------------------------------------------------------


def weighted_error(pred: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    """Weighted misclassification rate, clamped away from 0 and 1."""
    pred = np.asarray(pred)
    y = np.asarray(y)
    w = np.asarray(w, dtype=np.float64)
    if not (pred.shape == y.shape == w.shape):
        raise ValueError("prediction, label, and weight vectors differ in length")
    eps = float(w[pred != y].sum())
    return min(max(eps, _EPS_FLOOR), 1.0 - _EPS_FLOOR)


def voting_weight(error_rate: float, n_classes: int = 2, samme_correction: bool = False) -> float:
    """Half log-odds of the weighted error; never negative.

    A learner at or below chance keeps its role in the weight update but
    casts no vote. The optional multiclass correction adds half the log of
    (n_classes - 1).
    """
    eps = min(max(error_rate, _EPS_FLOOR), 1.0 - _EPS_FLOOR)
    beta = 0.5 * np.log((1.0 - eps) / eps)
    if samme_correction:
        beta += 0.5 * np.log(n_classes - 1.0)
    return float(max(beta, 0.0))


def update_weights(
    w: np.ndarray,
    delta: np.ndarray,
    rho: np.ndarray,
    beta: float,
    correct: np.ndarray,
) -> np.ndarray:
    """Apply the dampened boosting update and renormalize to sum 1.

    Correctly classified samples are down-weighted by exp(-beta); every
    sample is additionally shrunk by exp(-delta * (1 - rho)), which only
    bites where confidence is extreme and density is low.
    """
    w = np.asarray(w, dtype=np.float64)
    damp = np.exp(-np.asarray(delta) * (1.0 - np.asarray(rho)))
    out = damp * w * np.exp(-beta * np.asarray(correct, dtype=np.float64))
    return out / out.sum()


def regularized_beta(
    w: np.ndarray,
    delta: np.ndarray,
    rho: np.ndarray,
    correct: np.ndarray,
    n_classes: int = 2,
    samme_correction: bool = False,
    floor_at_zero: bool = True,
) -> float:
    """Voting weight minimizing the dampened exponential loss in closed form.

    With the dampener inactive (delta all zero) this reduces to the plain
    half log-odds of the weighted error.
    """
    w = np.asarray(w, dtype=np.float64)
    correct = np.asarray(correct, dtype=bool)
    alpha = w * np.exp(-np.asarray(delta) * (1.0 - np.asarray(rho)))
    total = alpha.sum()
    if total <= 0:
        raise ValueError("weights sum to zero")
    eps = float(alpha[~correct].sum() / total)
    eps = min(max(eps, _EPS_FLOOR), 1.0 - _EPS_FLOOR)
    beta = 0.5 * np.log((1.0 - eps) / eps)
    if samme_correction:
        beta += 0.5 * np.log(n_classes - 1.0)
    if floor_at_zero:
        beta = max(beta, 0.0)
    return float(beta)


# ---------------------------------------------------------------------------
# Training loops
# ---------------------------------------------------------------------------


def _fit_engine(train: Dataset, cfg: DargConfig, collect_reports: bool):
    cfg.validate()
    if train.n_classes < 2:
        raise ValueError("need at least two classes")
    counts = train.class_counts()
    if np.any(counts == 0):
        raise ValueError("every class needs at least one training sample")

    scaler = fit_scaler(train.features)
    X = apply_scaler(train.features, scaler)
    y = train.labels.copy()
    n_classes = train.n_classes

    w = np.full(len(y), 1.0 / len(y))
    deficits = counts.max() - counts
    generated = np.zeros(n_classes, dtype=np.int64)
    schedule = scheduler_weights(cfg.n_estimators)

    sampling_active = cfg.use_sampling and bool(deficits.any())
    trees: list[DecisionTree] = []
    betas: list[float] = []
    reports: list[EpochSamplingReport] = []

    for epoch in range(1, cfg.n_estimators + 1):
        tree = fit_tree(X, y, w, cfg.max_depth, seed=cfg.seed, n_classes=n_classes)
        probs = tree.predict_proba(X)
        pred = np.argmax(probs, axis=1)
        correct = pred == y

        need_density = cfg.use_density or sampling_active
        need_hardness = cfg.use_confidence or sampling_active
        density = (
            compute_density(X, y, cfg.k, scope=cfg.neighbor_scope) if need_density else None
        )
        profile = (
            confidence_factor(classification_hardness(probs, y)) if need_hardness else None
        )
        rho = density.rho if cfg.use_density else np.ones(len(y))
        delta = profile.confidence if cfg.use_confidence else np.zeros(len(y))

        if cfg.beta_mode == "regularized":
            beta = regularized_beta(
                w, delta, rho, correct, n_classes=n_classes, samme_correction=cfg.samme_correction
            )
        else:
            beta = voting_weight(
                weighted_error(pred, y, w), n_classes=n_classes, samme_correction=cfg.samme_correction
            )
        trees.append(tree)
        betas.append(beta)

        w = update_weights(w, delta, rho, beta, correct)

        if sampling_active:
            X, y, w, generated, report = dynamic_sample_epoch(
                X,
                y,
                w,
                density.rho,
                profile.hardness,
                profile.mean,
                profile.std,
                cfg.density_threshold,
                cfg.gmm_max_components,
                epoch,
                schedule,
                deficits,
                generated,
                cfg.seed,
            )
            if collect_reports:
                reports.append(report)
        elif collect_reports:
            reports.append(EpochSamplingReport(epoch=epoch, scheduler_weight=float(schedule[epoch - 1])))

    model = DargEnsemble(
        trees=trees, betas=betas, scaler=scaler, class_names=train.class_names, config=cfg
    )
    return model, reports


def fit_darg(train: Dataset, cfg: DargConfig) -> DargEnsemble:
    """Train the full model: dampened weight updates plus dynamic sampling."""
    model, _ = _fit_engine(train, cfg, collect_reports=False)
    return model


def fit_darg_with_reports(train: Dataset, cfg: DargConfig):
    """As :func:`fit_darg`, also returning the per-epoch sampling reports."""
    return _fit_engine(train, cfg, collect_reports=True)


def fit_adaboost_baseline(train: Dataset, cfg: DargConfig) -> DargEnsemble:
    """Classic AdaBoost on the same machinery: no dampener, no sampling."""
    plain = replace(
        cfg, use_density=False, use_confidence=False, use_sampling=False, beta_mode="classic"
    )
    model, _ = _fit_engine(train, plain, collect_reports=False)
    return model


def predict_ensemble(model: DargEnsemble, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weighted-vote labels and averaged probability scores.

    ``X`` is raw (unscaled) input; the stored scaler is applied internally.
    Score rows are the beta-weighted mean of tree probabilities, uniform
    when every voting weight is zero.
    """
    X = np.asarray(X, dtype=np.float64)
    Xs = apply_scaler(X, model.scaler)
    n, c = X.shape[0], model.n_classes
    votes = np.zeros((n, c))
    score_acc = np.zeros((n, c))
    beta_sum = 0.0
    rows = np.arange(n)
    for tree, beta in zip(model.trees, model.betas):
        if beta <= 0.0:
            continue
        probs = tree.predict_proba(Xs)
        votes[rows, np.argmax(probs, axis=1)] += beta
        score_acc += beta * probs
        beta_sum += beta
    labels = np.argmax(votes, axis=1)
    if beta_sum > 0.0:
        scores = score_acc / beta_sum
    else:
        scores = np.full((n, c), 1.0 / c)
    return labels, scores
