"""Dynamic oversampling guided by density and hardness regions.

Each under-represented class is decomposed into Gaussian mixture clusters
(component count chosen by BIC), its samples are partitioned into dense,
boundary, and noise regions, and a per-epoch share of the class deficit is
synthesized by interpolating from a boundary-region parent toward a
dense-region parent. A tangent-decay scheduler front-loads generation into
early epochs and tapers to zero by the final one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DENSE, BOUNDARY, NOISE = 0, 1, 2

_VAR_FLOOR = 1e-6
_EM_MAX_ITER = 100
_EM_TOL = 1e-6


# ---------------------------------------------------------------------------
# Gaussian mixture with BIC model selection
# ---------------------------------------------------------------------------


@dataclass
class ClusterModel:
    n_components: int
    means: np.ndarray  # (g, d)
    variances: np.ndarray  # (g, d) diagonal, floored
    weights: np.ndarray  # (g,)
    assignments: np.ndarray  # (n,) argmax responsibility
    log_likelihood: float
    bic: float


def _kmeanspp_centers(X: np.ndarray, g: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((g, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, g):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)  # all remaining mass on duplicate points
        centers[j] = X[idx]
        d2 = np.minimum(d2, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _log_gauss_diag(X, means, variances):
    # (n, g) log density under each diagonal-covariance component
    diff2 = (X[:, None, :] - means[None, :, :]) ** 2
    quad = (diff2 / variances[None, :, :]).sum(axis=2)
    log_det = np.log(2.0 * np.pi * variances).sum(axis=1)
    return -0.5 * (quad + log_det[None, :])


def _fit_gmm(X: np.ndarray, g: int, rng: np.random.Generator) -> tuple:
    n, d = X.shape
    centers = _kmeanspp_centers(X, g, rng)
    # hard assignment to the nearest center seeds the first M-step
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    resp = np.zeros((n, g))
    resp[np.arange(n), np.argmin(d2, axis=1)] = 1.0

    prev_ll = -np.inf
    means = centers
    variances = np.ones((g, d))
    weights = np.full(g, 1.0 / g)
    for _ in range(_EM_MAX_ITER):
        nk = resp.sum(axis=0) + 10.0 * np.finfo(float).eps
        weights = nk / nk.sum()
        means = (resp.T @ X) / nk[:, None]
        variances = (resp.T @ (X * X)) / nk[:, None] - means**2
        variances = np.maximum(variances, _VAR_FLOOR)

        log_prob = _log_gauss_diag(X, means, variances) + np.log(weights)
        log_norm = _logsumexp_rows(log_prob)
        ll = float(log_norm.sum())
        resp = np.exp(log_prob - log_norm[:, None])
        if ll < prev_ll - _EM_TOL * (1.0 + abs(prev_ll)):
            raise AssertionError("EM log-likelihood decreased")
        if abs(ll - prev_ll) < _EM_TOL:
            prev_ll = ll
            break
        prev_ll = ll
    assignments = np.argmax(resp, axis=1)
    return means, variances, weights, assignments, prev_ll


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=1)
    return m + np.log(np.exp(a - m[:, None]).sum(axis=1))


def fit_gmm_bic(Xc: np.ndarray, g_max: int, seed) -> ClusterModel:
    """Fit diagonal-covariance mixtures for g = 1..min(g_max, n) and keep the
    lowest-BIC model; ties resolve to the smaller component count."""
    Xc = np.atleast_2d(np.asarray(Xc, dtype=np.float64))
    n, d = Xc.shape
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    best: ClusterModel | None = None
    for g in range(1, min(g_max, n) + 1):
        means, variances, weights, assignments, ll = _fit_gmm(Xc, g, rng)
        n_params = 2 * g * d + (g - 1)
        bic = -2.0 * ll + n_params * math.log(n)
        if best is None or bic < best.bic:
            best = ClusterModel(
                n_components=g,
                means=means,
                variances=variances,
                weights=weights,
                assignments=assignments,
                log_likelihood=ll,
                bic=bic,
            )
    return best


# ---------------------------------------------------------------------------
# Region partitioning and the sampling plan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionPartition:
    """Per-sample region labels: DENSE, BOUNDARY, or NOISE."""

    region: np.ndarray

    @property
    def dense_mask(self) -> np.ndarray:
        return self.region == DENSE

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.region == BOUNDARY

    @property
    def noise_mask(self) -> np.ndarray:
        return self.region == NOISE


def partition_regions(rho, hardness, mean_h, std_h, density_threshold) -> RegionPartition:
    """Dense when rho >= threshold; otherwise boundary when hardness stays
    strictly above mean_h - std_h, noise when it does not."""
    rho = np.asarray(rho, dtype=np.float64)
    hardness = np.asarray(hardness, dtype=np.float64)
    if rho.shape != hardness.shape:
        raise ValueError("density and hardness vectors differ in length")
    region = np.full(rho.shape, NOISE, dtype=np.int64)
    dense = rho >= density_threshold
    boundary = ~dense & (hardness > mean_h - std_h)
    region[dense] = DENSE
    region[boundary] = BOUNDARY
    return RegionPartition(region=region)


def cluster_weights(rho: np.ndarray, assignments: np.ndarray, n_clusters: int) -> np.ndarray:
    """Share of the sampling budget per cluster, proportional to the cluster's
    summed density factor (mean density times size). All-zero mass falls back
    to a uniform split."""
    if n_clusters < 1:
        raise ValueError("need at least one cluster")
    rho = np.asarray(rho, dtype=np.float64)
    numer = np.bincount(np.asarray(assignments), weights=rho, minlength=n_clusters)
    total = numer.sum()
    if total <= 0:
        return np.full(n_clusters, 1.0 / n_clusters)
    return numer / total


def scheduler_weights(m: int) -> np.ndarray:
    """Tangent-decay epoch weights: largest share first, exactly zero last."""
    if m < 1:
        raise ValueError("need at least one epoch")
    if m == 1:
        return np.array([1.0])
    t = np.arange(1, m + 1, dtype=np.float64)
    raw = np.tan((m - t) / (m - 1) * (np.pi / 4.0))
    return raw / raw.sum()


def sampling_targets(deficit: int, P: np.ndarray, O: np.ndarray, t: int) -> np.ndarray:
    """Per-cluster synthesis counts for epoch t (1-based): floor(P_s * O_t * deficit)."""
    if deficit < 0:
        raise ValueError("deficit must be non-negative")
    if not 1 <= t <= len(O):
        raise ValueError("epoch index out of range")
    return np.floor(np.asarray(P) * O[t - 1] * deficit).astype(np.int64)


# ---------------------------------------------------------------------------
# Region-guided generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthesisRecord:
    parent_a: int  # boundary-region row of the matrix passed in
    parent_b: int  # dense-region row
    lam: float
    point: np.ndarray


def generate_samples(
    X: np.ndarray,
    boundary_idx: np.ndarray,
    dense_idx: np.ndarray,
    count: int,
    rng: np.random.Generator,
) -> list[SynthesisRecord]:
    """Interpolate ``count`` points from a boundary parent toward a dense parent.

    When one region is empty both parents come from the other; when both are
    empty no records are produced and the caller reports the shortfall.
    """
    boundary_idx = np.asarray(boundary_idx, dtype=np.int64)
    dense_idx = np.asarray(dense_idx, dtype=np.int64)
    if len(boundary_idx) == 0 and len(dense_idx) == 0:
        return []
    a_pool = boundary_idx if len(boundary_idx) else dense_idx
    b_pool = dense_idx if len(dense_idx) else boundary_idx
    records = []
    for _ in range(count):
        ia = int(a_pool[rng.integers(len(a_pool))])
        ib = int(b_pool[rng.integers(len(b_pool))])
        lam = float(rng.random())
        point = X[ia] + lam * (X[ib] - X[ia])
        records.append(SynthesisRecord(parent_a=ia, parent_b=ib, lam=lam, point=point))
    return records


# ---------------------------------------------------------------------------
# Per-epoch orchestration
# ---------------------------------------------------------------------------


@dataclass
class ClusterSamplingRecord:
    cluster: int
    size: int
    dense: int
    boundary: int
    noise: int
    weight: float
    target: int
    generated: int
    shortfall: int

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "size": self.size,
            "dense": self.dense,
            "boundary": self.boundary,
            "noise": self.noise,
            "weight": self.weight,
            "target": self.target,
            "generated": self.generated,
            "shortfall": self.shortfall,
        }


@dataclass
class ClassSamplingReport:
    class_index: int
    deficit: int
    remaining_before: int
    n_clusters: int
    clusters: list[ClusterSamplingRecord] = field(default_factory=list)

    @property
    def generated_total(self) -> int:
        return sum(c.generated for c in self.clusters)

    @property
    def shortfall_total(self) -> int:
        return sum(c.shortfall for c in self.clusters)

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "deficit": self.deficit,
            "remaining_before": self.remaining_before,
            "n_clusters": self.n_clusters,
            "generated_total": self.generated_total,
            "shortfall_total": self.shortfall_total,
            "clusters": [c.to_dict() for c in self.clusters],
        }


@dataclass
class EpochSamplingReport:
    epoch: int
    scheduler_weight: float
    classes: list[ClassSamplingReport] = field(default_factory=list)

    @property
    def total_target(self) -> int:
        return sum(c.target for report in self.classes for c in report.clusters)

    @property
    def total_generated(self) -> int:
        return sum(report.generated_total for report in self.classes)

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "scheduler_weight": self.scheduler_weight,
            "total_target": self.total_target,
            "total_generated": self.total_generated,
            "classes": [c.to_dict() for c in self.classes],
        }


def dynamic_sample_epoch(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    rho: np.ndarray,
    hardness: np.ndarray,
    mean_h: float,
    std_h: float,
    density_threshold: float,
    gmm_max_components: int,
    epoch: int,
    scheduler: np.ndarray,
    original_deficits: np.ndarray,
    generated_counts: np.ndarray,
    master_seed: int,
):
    """Run one epoch of dynamic sampling over every deficient class.

    Deficits are measured against the original class counts; generation
    already booked in earlier epochs caps the remaining budget so the
    cumulative total never exceeds the original deficit. New rows inherit
    the mean current weight of their class before renormalization.

    Returns ``(X', y', w', generated_counts', report)``.
    """
    new_X: list[np.ndarray] = []
    new_y: list[int] = []
    new_w: list[float] = []
    generated_counts = generated_counts.copy()
    report = EpochSamplingReport(epoch=epoch, scheduler_weight=float(scheduler[epoch - 1]))

    for cls in range(len(original_deficits)):
        deficit = int(original_deficits[cls])
        if deficit <= 0:
            continue
        remaining = deficit - int(generated_counts[cls])
        idx = np.nonzero(y == cls)[0]
        cls_report = ClassSamplingReport(
            class_index=cls, deficit=deficit, remaining_before=remaining, n_clusters=0
        )
        report.classes.append(cls_report)
        if remaining <= 0 or len(idx) == 0:
            continue

        rng = np.random.default_rng([master_seed, epoch, cls])
        Xc = X[idx]
        model = fit_gmm_bic(Xc, min(gmm_max_components, len(idx)), rng)
        cls_report.n_clusters = model.n_components
        regions = partition_regions(rho[idx], hardness[idx], mean_h, std_h, density_threshold)
        P = cluster_weights(rho[idx], model.assignments, model.n_components)
        targets = sampling_targets(deficit, P, scheduler, epoch)

        budget = remaining
        mean_weight = float(w[idx].mean())
        for s in range(model.n_components):
            member_mask = model.assignments == s
            alloc = int(min(targets[s], budget))
            local_boundary = np.nonzero(member_mask & regions.boundary_mask)[0]
            local_dense = np.nonzero(member_mask & regions.dense_mask)[0]
            records = generate_samples(Xc, local_boundary, local_dense, alloc, rng)
            budget -= alloc
            for rec in records:
                new_X.append(rec.point)
                new_y.append(cls)
                new_w.append(mean_weight)
            cls_report.clusters.append(
                ClusterSamplingRecord(
                    cluster=s,
                    size=int(member_mask.sum()),
                    dense=int((member_mask & regions.dense_mask).sum()),
                    boundary=int((member_mask & regions.boundary_mask).sum()),
                    noise=int((member_mask & regions.noise_mask).sum()),
                    weight=float(P[s]),
                    target=alloc,
                    generated=len(records),
                    shortfall=alloc - len(records),
                )
            )
        generated_counts[cls] += cls_report.generated_total

    if new_X:
        X = np.vstack([X, np.asarray(new_X)])
        y = np.concatenate([y, np.asarray(new_y, dtype=y.dtype)])
        w = np.concatenate([w, np.asarray(new_w)])
        w = w / w.sum()
    return X, y, w, generated_counts, report
