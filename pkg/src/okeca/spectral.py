"""Symmetric eigendecomposition of (uncentered) kernel matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

SYMMETRY_RTOL = 1e-10
PSD_RTOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs sorted by descending eigenvalue.

    ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``. Eigenvalues are
    clamped at zero once validated as PSD up to round-off.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        E = self.eigenvectors
        return (E * self.eigenvalues) @ E.T


def fix_signs(E):
    """Flip each column so that its largest-magnitude entry is positive.

    Ties resolve to the first such entry (``argmax`` semantics).
    """
    idx = np.argmax(np.abs(E), axis=0)
    signs = np.sign(E[idx, np.arange(E.shape[1])])
    signs[signs == 0] = 1.0
    return E * signs


def eig_sym(K) -> EigenDecomposition:
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise ValueError("matrix contains NaN or Inf")
    n = K.shape[0]
    scale = np.max(np.abs(K)) if K.size else 0.0
    if np.max(np.abs(K - K.T)) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric")

    lam, E = linalg.eigh(0.5 * (K + K.T))
    lam, E = lam[::-1], E[:, ::-1]
    floor = -PSD_RTOL * n * scale
    if lam.size and lam[-1] < floor:
        raise ValueError(
            f"matrix is not positive semi-definite (smallest eigenvalue {lam[-1]:.3e})"
        )
    lam = np.maximum(lam, 0.0)
    return EigenDecomposition(lam, fix_signs(np.ascontiguousarray(E)))
