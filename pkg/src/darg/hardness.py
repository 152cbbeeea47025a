"""Classification hardness and the Gaussian confidence factor.

Hardness blends how little probability the current learner puts on the true
class with how much it puts on the strongest rival: 0 is trivially easy,
1 is confidently wrong, 0.5 sits on the decision boundary. The confidence
factor measures how far a sample's hardness strays from the population mean
through an inverted Gaussian bump: 0 at the mean, approaching 1 at the
extremes (very easy samples and likely noise alike).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class HardnessProfile:
    hardness: np.ndarray
    mean: float
    std: float
    confidence: np.ndarray


def classification_hardness(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.ndim != 2 or probs.shape[1] < 2:
        raise ValueError("need a probability matrix with at least two classes")
    if probs.shape[0] != labels.shape[0]:
        raise ValueError("probability rows and labels differ in length")
    if np.any(probs < -1e-12):
        raise ValueError("negative probabilities")
    row_sums = probs.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > 1e-9):
        raise ValueError("probability rows must sum to 1")
    n = probs.shape[0]
    p_true = probs[np.arange(n), labels]
    masked = probs.copy()
    masked[np.arange(n), labels] = -np.inf
    p_rival = masked.max(axis=1)
    return (1.0 - p_true + p_rival) / 2.0


def confidence_factor(hardness: np.ndarray) -> HardnessProfile:
    h = np.asarray(hardness, dtype=np.float64)
    if h.size == 0:
        raise ValueError("hardness vector is empty")
    if h.min() < 0.0 or h.max() > 1.0:
        raise ValueError("hardness values must lie in [0, 1]")
    mu = float(h.mean())
    sigma = float(h.std())
    if sigma < _SIGMA_FLOOR:
        # Every sample equally hard: there is no confidence signal.
        delta = np.zeros_like(h)
        return HardnessProfile(hardness=h, mean=mu, std=sigma, confidence=delta)
    delta = 1.0 - np.exp(-((h - mu) ** 2) / (2.0 * sigma * sigma))
    return HardnessProfile(hardness=h, mean=mu, std=sigma, confidence=delta)
