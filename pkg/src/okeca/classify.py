"""MAP classification over class-conditional reduced-rank densities."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_samples
from .kde import DensityEstimate
from .keca import KECA, METHODS, OKECA, EntropyModel, fit_keca
from .rotation import AscentConfig, fit_okeca


def fit_model(X, sigma, method=KECA, cfg=None):
    if method == KECA:
        return fit_keca(X, sigma)
    if method == OKECA:
        return fit_okeca(X, sigma, cfg or AscentConfig())
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


@dataclass(frozen=True)
class MapClassifier:
    classes: np.ndarray
    priors: np.ndarray
    densities: tuple

    @property
    def components(self):
        """Retained component count per class (after clamping to class size)."""
        return [est.r for est in self.densities]

    def class_densities(self, query):
        Q = as_samples(query)
        return np.column_stack([est.pdf(Q) for est in self.densities])

    def predict(self, query):
        scores = self.class_densities(query) * self.priors
        # column order encodes the tie rule: larger prior first, then smaller class id
        rank = np.lexsort((np.arange(len(self.classes)), -self.priors))
        best = np.argmax(scores[:, rank], axis=1)
        return self.classes[rank[best]]

    def to_dict(self):
        return {
            "classes": self.classes.tolist(),
            "priors": self.priors.tolist(),
            "components": self.components,
            "models": [est.model.to_dict() for est in self.densities],
        }

    @classmethod
    def from_dict(cls, doc):
        densities = tuple(
            DensityEstimate(EntropyModel.from_dict(m), r)
            for m, r in zip(doc["models"], doc["components"])
        )
        return cls(np.array(doc["classes"]), np.array(doc["priors"], dtype=float), densities)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def fit_map(X, y, sigma, method=KECA, r=None, cfg=None) -> MapClassifier:
    """Fit one reduced-rank density per class with a shared sigma, method and r.

    ``r=None`` retains every component. Classes smaller than ``r`` use all
    their samples' components, with a warning.
    """
    X = as_samples(X)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise ValueError(f"labels must have shape ({X.shape[0]},), got {y.shape}")
    classes, counts = np.unique(y, return_counts=True)
    densities = []
    for c, m in zip(classes, counts):
        if m < 2:
            raise ValueError(f"class {c} has {m} sample(s); need at least 2")
        rc = m if r is None else int(r)
        if rc < 1:
            raise ValueError(f"r must be >= 1, got {r}")
        if rc > m:
            warnings.warn(f"class {c}: r={rc} exceeds its {m} samples, using {m}", stacklevel=2)
            rc = m
        model = fit_model(X[y == c], sigma, method, cfg)
        densities.append(DensityEstimate(model, rc))
    priors = counts / counts.sum()
    return MapClassifier(classes, priors, tuple(densities))


def predict(clf: MapClassifier, query):
    return clf.predict(query)


def overall_accuracy(pred, truth) -> float:
    """Percentage of correct predictions."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("cannot score an empty prediction")
    return 100.0 * int(np.count_nonzero(pred == truth)) / pred.size
