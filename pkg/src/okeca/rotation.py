"""Optimized rotation of the kernel eigenbasis (OKECA).

Each column ``w_k`` of the rotation maximizes ``(g^T w)^2`` with
``g = D^(1/2) E^T 1`` by projected gradient ascent, deflated against the
columns already found.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._validation import as_samples, check_positive
from .keca import OKECA, EntropyModel, decompose, entropy_order
from .spectral import EigenDecomposition

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-8
# objective values below this fraction of ||g||^2 count as zero in the stopping rule
OBJECTIVE_FLOOR = 1e-12


class ExhaustedSpaceError(ValueError):
    """Raised when previous directions already span the whole space."""


@dataclass(frozen=True)
class AscentConfig:
    """Gradient-ascent settings.

    ``tau=None`` selects ``0.5 / ||g||^2``. A step that would lower the
    objective is halved until it does not.
    """

    tau: float | None = None
    max_iters: int = 1000
    rel_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.tau is not None:
            check_positive(self.tau, "tau")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        check_positive(self.rel_tol, "rel_tol")


@dataclass(frozen=True)
class EntropySource:
    """The vector ``g = D^(1/2) E^T 1`` through which the objective factors."""

    g: np.ndarray

    @classmethod
    def from_eig(cls, eig: EigenDecomposition):
        return cls(np.sqrt(eig.eigenvalues) * eig.eigenvectors.sum(axis=0))

    @property
    def n(self):
        return self.g.shape[0]

    @property
    def total(self):
        return float(self.g @ self.g)


def _check_unit(w):
    w = np.asarray(w, dtype=float)
    if abs(np.linalg.norm(w) - 1.0) > UNIT_TOL:
        raise ValueError(f"w must have unit norm, got {np.linalg.norm(w):.12g}")
    return w


def objective(source: EntropySource, w) -> float:
    return float(source.g @ _check_unit(w)) ** 2


def gradient(source: EntropySource, w) -> np.ndarray:
    return 2.0 * float(source.g @ _check_unit(w)) * source.g


def first_component_closed_form(source: EntropySource) -> np.ndarray:
    """Maximizer of ``(g^T w)^2`` on the unit sphere, ``g / ||g||``."""
    norm = np.linalg.norm(source.g)
    if not norm > 0:
        raise ValueError("entropy source vector is zero; objective is degenerate")
    return source.g / norm


def _deflate(w, previous):
    if previous is None or previous.shape[1] == 0:
        return w
    # two passes keep orthogonality at round-off level
    w = w - previous @ (previous.T @ w)
    return w - previous @ (previous.T @ w)


def _as_previous(previous, n):
    if previous is None:
        return np.zeros((n, 0))
    P = np.asarray(previous, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] != n and P.shape[1] == n:
        P = P.T
    if P.shape[1] and np.max(np.abs(P.T @ P - np.eye(P.shape[1]))) > UNIT_TOL:
        raise ValueError("previous directions are not orthonormal")
    return P


def initial_direction(n, index, seed):
    """Seeded uniform draw on the unit sphere for component ``index``."""
    rng = np.random.default_rng([int(seed), int(index)])
    w = rng.standard_normal(n)
    return w / np.linalg.norm(w)


def fit_component(source: EntropySource, previous=None, cfg=AscentConfig(), *,
                  return_history=False):
    """Find one unit direction maximizing the objective orthogonally to ``previous``.

    Parameters
    ----------
    source : EntropySource
    previous : array of shape (n, k), optional
        Orthonormal directions already extracted.
    cfg : AscentConfig
    return_history : bool
        Also return the objective value after every accepted iterate.

    Returns
    -------
    w : ndarray of shape (n,)
    history : list of float
        Only when ``return_history`` is set.
    """
    g = source.g
    n = source.n
    P = _as_previous(previous, n)
    w = _deflate(initial_direction(n, P.shape[1], cfg.seed), P)
    norm = np.linalg.norm(w)
    if norm < 1e-8:
        raise ExhaustedSpaceError(
            f"{P.shape[1]} previous directions leave no room in dimension {n}"
        )
    w /= norm

    G = source.total
    tau = cfg.tau if cfg.tau is not None else (0.5 / G if G > 0 else 1.0)
    floor = OBJECTIVE_FLOOR * G
    L = float(g @ w) ** 2
    history = [L]
    for _ in range(int(cfg.max_iters)):
        grad = 2.0 * float(g @ w) * g
        step = tau
        while True:
            cand = _deflate(w + step * grad, P)
            cand /= np.linalg.norm(cand)
            L_new = float(g @ cand) ** 2
            if L_new >= L or step < 1e-30:
                break
            step *= 0.5
        if L_new < L:
            break
        delta = L_new - L
        w, L = cand, L_new
        history.append(L)
        if abs(delta) <= cfg.rel_tol * max(L, floor):
            break
    else:
        logger.debug("gradient ascent hit max_iters=%d", cfg.max_iters)

    return (w, history) if return_history else w


def rotation_matrix(source: EntropySource, cfg=AscentConfig(), n_components=None):
    """Build W column by column with deflation."""
    n = source.n
    k_max = n if n_components is None else int(n_components)
    W = np.zeros((n, k_max))
    for k in range(k_max):
        W[:, k] = fit_component(source, W[:, :k], cfg)
    return W


def fit_okeca(X, sigma, cfg=AscentConfig()) -> EntropyModel:
    """Fit the rotated decomposition ``K = (E D^(1/2) W)(E D^(1/2) W)^T``."""
    X = as_samples(X)
    sigma = check_positive(sigma, "sigma")
    _, eig = decompose(X, sigma)
    source = EntropySource.from_eig(eig)
    W = rotation_matrix(source, cfg)
    values = (source.g @ W) ** 2
    # second key only matters on exact ties: keep fitting order
    order = entropy_order(values, np.zeros_like(values))
    return EntropyModel(OKECA, sigma, eig, W, order, X)
