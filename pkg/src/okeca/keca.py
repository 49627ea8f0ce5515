"""Entropy values, entropy-sorted components and out-of-sample projection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_samples, check_positive
from .kernel import KernelModel, cross_kernel, kernel_matrix
from .spectral import EigenDecomposition, eig_sym

KECA = "KECA"
OKECA = "OKECA"
METHODS = (KECA, OKECA)


def information_potential(K) -> float:
    """Mean of all kernel matrix entries, ``1^T K 1 / n^2``."""
    K = np.asarray(K, dtype=float)
    return float(K.sum() / K.shape[0] ** 2)


def entropy_values(eig: EigenDecomposition) -> np.ndarray:
    """Per-eigenpair contributions ``(sqrt(lambda_j) * 1^T e_j)^2`` in eigenvalue order."""
    return eig.eigenvalues * eig.eigenvectors.sum(axis=0) ** 2


def entropy_order(values, eigenvalues) -> np.ndarray:
    """Descending entropy; ties by descending eigenvalue, then original index."""
    idx = np.arange(len(values))
    return np.lexsort((idx, -np.asarray(eigenvalues), -np.asarray(values)))


def nonzero_inverse_sqrt(eigenvalues):
    lam = np.asarray(eigenvalues, dtype=float)
    top = lam.max(initial=0.0)
    cutoff = lam.size * np.finfo(float).eps * top
    out = np.zeros_like(lam)
    keep = lam > cutoff
    out[keep] = lam[keep] ** -0.5
    return out


@dataclass(frozen=True)
class EntropyModel:
    """A fitted KECA or OKECA decomposition ``K = B B^T``.

    ``rotation`` holds W with columns in fitting order (identity for KECA);
    ``order`` is the permutation sorting components by descending entropy
    value, so ``basis == E D^(1/2) W[:, order]``.
    """

    method: str
    sigma: float
    eig: EigenDecomposition
    rotation: np.ndarray
    order: np.ndarray
    train: np.ndarray
    basis: np.ndarray = field(init=False, repr=False)
    entropy_values: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        A = self.eig.eigenvectors * np.sqrt(self.eig.eigenvalues)
        B = A @ self.sorted_rotation
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "entropy_values", B.sum(axis=0) ** 2)

    @property
    def n(self):
        return self.train.shape[0]

    @property
    def d(self):
        return self.train.shape[1]

    @property
    def sorted_rotation(self):
        return self.rotation[:, self.order]

    @property
    def kernel(self):
        return KernelModel(self.sigma, self.train, normalized=False)

    @property
    def total_ip(self):
        """``1^T K 1``, the unnormalized information potential of the training set."""
        return float(self.eig.eigenvalues @ self.eig.eigenvectors.sum(axis=0) ** 2)

    def to_dict(self):
        return {
            "method": self.method,
            "sigma": self.sigma,
            "n": self.n,
            "d": self.d,
            "eigenvalues": self.eig.eigenvalues.tolist(),
            "eigenvectors": self.eig.eigenvectors.tolist(),
            "basis": self.basis.tolist(),
            "rotation": self.rotation.tolist(),
            "order": self.order.tolist(),
            "entropy_values": self.entropy_values.tolist(),
            "train_samples": self.train.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        n, d = int(doc["n"]), int(doc["d"])
        eig = EigenDecomposition(
            np.array(doc["eigenvalues"], dtype=float).reshape(n),
            np.array(doc["eigenvectors"], dtype=float).reshape(n, n),
        )
        return cls(
            method=doc["method"],
            sigma=float(doc["sigma"]),
            eig=eig,
            rotation=np.array(doc["rotation"], dtype=float).reshape(n, n),
            order=np.array(doc["order"], dtype=int).reshape(n),
            train=np.array(doc["train_samples"], dtype=float).reshape(n, d),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def decompose(X, sigma):
    """Unnormalized kernel matrix of ``X`` and its eigendecomposition."""
    K = kernel_matrix(KernelModel(sigma, X, normalized=False))
    return K, eig_sym(K)


def fit_keca(X, sigma) -> EntropyModel:
    """Eigendecompose the uncentered kernel matrix and sort eigenpairs by entropy value."""
    X = as_samples(X)
    sigma = check_positive(sigma, "sigma")
    _, eig = decompose(X, sigma)
    order = entropy_order(entropy_values(eig), eig.eigenvalues)
    return EntropyModel(KECA, sigma, eig, np.eye(eig.n), order, X)


def cumulative_ip(model: EntropyModel, n_components: int) -> float:
    """Sum of the ``n_components`` largest sorted entropy values."""
    if not 1 <= n_components <= model.n:
        raise ValueError(f"n_components must lie in [1, {model.n}], got {n_components}")
    # sequential sum keeps the curve monotone in floating point
    return float(np.cumsum(model.entropy_values)[n_components - 1])


def transform(model: EntropyModel, query, r: int) -> np.ndarray:
    """Project queries onto the ``r`` leading components, shape (m, r).

    Uses ``W^T D^(-1/2) E^T k*``; eigenpairs with numerically zero
    eigenvalue contribute nothing.
    """
    if not 1 <= r <= model.n:
        raise ValueError(f"r must lie in [1, {model.n}], got {r}")
    k = cross_kernel(model.kernel, query)
    coords = (model.eig.eigenvectors.T @ k) * nonzero_inverse_sqrt(model.eig.eigenvalues)[:, None]
    return (model.sorted_rotation[:, :r].T @ coords).T
