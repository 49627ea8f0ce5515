"""Gaussian RBF kernel evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_samples


def squared_distances(X, Y=None):
    """Squared Euclidean distances via the expanded form, tiny negatives clamped."""
    X = np.asarray(X, dtype=float)
    Y = X if Y is None else np.asarray(Y, dtype=float)
    xx = np.einsum("ij,ij->i", X, X)
    yy = xx if Y is X else np.einsum("ij,ij->i", Y, Y)
    D = xx[:, None] + yy[None, :] - 2.0 * (X @ Y.T)
    np.maximum(D, 0.0, out=D)
    if Y is X:
        np.fill_diagonal(D, 0.0)
        D = 0.5 * (D + D.T)
    return D


def pairwise_distances(X):
    """Condensed vector of the n(n-1)/2 Euclidean distances, pairs i < j in row order."""
    X = as_samples(X)
    n = X.shape[0]
    if n < 2:
        raise ValueError(f"pairwise distances need at least 2 samples, got {n}")
    iu = np.triu_indices(n, k=1)
    return np.sqrt(squared_distances(X)[iu])


def gaussian_constant(sigma, d):
    return (2.0 * np.pi * sigma**2) ** (-d / 2.0)


@dataclass(frozen=True)
class KernelModel:
    """Gaussian kernel bound to a training sample.

    Parameters
    ----------
    sigma : float
        Length-scale, strictly positive.
    train : ndarray of shape (n, d)
        Reference samples.
    normalized : bool
        If True the kernel carries the density constant ``(2 pi sigma^2)^(-d/2)``
        so that it integrates to one; otherwise its peak value is 1.
    """

    sigma: float
    train: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        sigma = float(self.sigma)
        if not np.isfinite(sigma) or sigma <= 0:
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "train", as_samples(self.train))

    @property
    def n(self):
        return self.train.shape[0]

    @property
    def d(self):
        return self.train.shape[1]

    @property
    def constant(self):
        return gaussian_constant(self.sigma, self.d) if self.normalized else 1.0

    def with_normalization(self, normalized):
        return KernelModel(self.sigma, self.train, normalized)

    def _apply(self, sq):
        return self.constant * np.exp(-sq / (2.0 * self.sigma**2))


def kernel_matrix(model: KernelModel) -> np.ndarray:
    """Symmetric n x n kernel matrix of the training samples."""
    K = model._apply(squared_distances(model.train))
    return 0.5 * (K + K.T)


def cross_kernel(model: KernelModel, query) -> np.ndarray:
    """Kernel evaluations between training samples (rows) and queries (columns)."""
    Q = as_samples(query)
    if Q.shape[1] != model.d:
        raise ValueError(
            f"query has {Q.shape[1]} features, kernel was built on {model.d}"
        )
    return model._apply(squared_distances(model.train, Q))
