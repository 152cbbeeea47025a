"""Density-aware, region-guided boosting for multiclass imbalanced data."""

from .boosting import (
    DargConfig,
    DargEnsemble,
    fit_adaboost_baseline,
    fit_darg,
    fit_darg_with_reports,
    predict_ensemble,
    regularized_beta,
    update_weights,
    voting_weight,
    weighted_error,
)
from .data import (
    DataFormatError,
    Dataset,
    ScalerParams,
    SplitSpec,
    load_csv,
    load_keel,
    standardize,
    stratified_split,
)
from .evaluation import MetricsReport, SearchSpace, compute_metrics, cross_validate, random_search
from .geometry import DensityProfile, NeighborGraph, compute_density, density_factor, knn_graph, mutual_graph
from .hardness import HardnessProfile, classification_hardness, confidence_factor
from .sampling import (
    ClusterModel,
    RegionPartition,
    SynthesisRecord,
    cluster_weights,
    dynamic_sample_epoch,
    fit_gmm_bic,
    generate_samples,
    partition_regions,
    sampling_targets,
    scheduler_weights,
)
from .tree import DecisionTree, fit_tree

__version__ = "0.1.0"

__all__ = [
    "DargConfig",
    "DargEnsemble",
    "DataFormatError",
    "Dataset",
    "DecisionTree",
    "DensityProfile",
    "HardnessProfile",
    "MetricsReport",
    "NeighborGraph",
    "RegionPartition",
    "ScalerParams",
    "SearchSpace",
    "SplitSpec",
    "SynthesisRecord",
    "ClusterModel",
    "classification_hardness",
    "cluster_weights",
    "compute_density",
    "compute_metrics",
    "confidence_factor",
    "cross_validate",
    "density_factor",
    "dynamic_sample_epoch",
    "fit_adaboost_baseline",
    "fit_darg",
    "fit_darg_with_reports",
    "fit_gmm_bic",
    "fit_tree",
    "generate_samples",
    "knn_graph",
    "load_csv",
    "load_keel",
    "mutual_graph",
    "partition_regions",
    "predict_ensemble",
    "random_search",
    "regularized_beta",
    "sampling_targets",
    "scheduler_weights",
    "standardize",
    "stratified_split",
    "update_weights",
    "voting_weight",
    "weighted_error",
]
