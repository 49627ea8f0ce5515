"""Kernel length-scale selection rules."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ._validation import as_samples
from .kernel import pairwise_distances, squared_distances

ML = "ML"
SILVERMAN = "Silverman"
MEAN_DIST = "MeanDist"
MEDIAN15 = "Median15"
CLASS_CV = "ClassCV"
UNSUPERVISED_RULES = (ML, SILVERMAN, MEAN_DIST, MEDIAN15)
RULES = UNSUPERVISED_RULES + (CLASS_CV,)

# short names used on the command line and in output tables
RULE_ALIASES = {
    "ml": ML,
    "silv": SILVERMAN,
    "silverman": SILVERMAN,
    "d1": MEAN_DIST,
    "meandist": MEAN_DIST,
    "d2": MEDIAN15,
    "median15": MEDIAN15,
    "class": CLASS_CV,
    "classcv": CLASS_CV,
}


class DegenerateDataError(ValueError):
    pass


def resolve_rule(name):
    if name in RULES:
        return name
    try:
        return RULE_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown sigma rule {name!r}; choose from {sorted(RULE_ALIASES)}") from None


def check_grid(grid):
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("sigma grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
        raise ValueError("sigma grid values must be finite and > 0")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("sigma grid must be strictly increasing")
    return grid


def sigma_mean_dist(X) -> float:
    """Mean pairwise Euclidean distance."""
    return float(np.mean(pairwise_distances(X)))


def sigma_median15(X) -> float:
    """15% of the median pairwise Euclidean distance."""
    return 0.15 * float(np.median(pairwise_distances(X)))


def sigma_silverman(X) -> float:
    """Multivariate rule of thumb ``s (4/(d+2))^(1/(d+4)) n^(-1/(d+4))``.

    ``s`` is the mean of the per-feature sample standard deviations.
    """
    X = as_samples(X)
    n, d = X.shape
    if n < 2:
        raise ValueError(f"Silverman's rule needs at least 2 samples, got {n}")
    s = float(np.mean(np.std(X, axis=0, ddof=1)))
    if s <= 0:
        raise DegenerateDataError("all features are constant")
    return s * (4.0 / (d + 2)) ** (1.0 / (d + 4)) * n ** (-1.0 / (d + 4))


def default_grid(X, num=50):
    """Log-spaced candidates from 0.01 to 10 times the mean pairwise distance."""
    d1 = sigma_mean_dist(X)
    if d1 <= 0:
        raise DegenerateDataError("all samples coincide; cannot build a sigma grid")
    return np.logspace(np.log10(0.01 * d1), np.log10(10.0 * d1), num)


def loo_log_likelihood(X, grid) -> np.ndarray:
    """Leave-one-out log-likelihood of a normalized Gaussian Parzen estimate per grid value."""
    X = as_samples(X)
    grid = check_grid(grid)
    n, d = X.shape
    if n < 2:
        raise ValueError(f"leave-one-out likelihood needs at least 2 samples, got {n}")
    D = squared_distances(X)
    off = ~np.eye(n, dtype=bool)
    Doff = D[off].reshape(n, n - 1)
    out = np.empty(grid.size)
    for i, s in enumerate(grid):
        log_c = -0.5 * d * np.log(2.0 * np.pi * s * s)
        log_p = log_c - np.log(n - 1) + logsumexp(-Doff / (2.0 * s * s), axis=1)
        out[i] = log_p.sum()
    return out


def sigma_ml(X, grid=None) -> float:
    """Grid value maximizing the leave-one-out likelihood; ties go to the smaller sigma."""
    X = as_samples(X)
    grid = default_grid(X) if grid is None else check_grid(grid)
    ll = loo_log_likelihood(X, grid)
    if not np.any(np.isfinite(ll)):
        raise DegenerateDataError("leave-one-out likelihood is zero on the whole grid; widen it")
    return float(grid[int(np.nanargmax(np.where(np.isfinite(ll), ll, -np.inf)))])


def cv_accuracies(X, y, grid, folds=5, n_components=None, method="KECA", seed=0, cfg=None):
    """Mean stratified k-fold overall accuracy of the MAP classifier per grid value."""
    from sklearn.model_selection import StratifiedKFold

    from .classify import fit_map, overall_accuracy

    X = as_samples(X)
    y = np.asarray(y)
    grid = check_grid(grid)
    folds = int(folds)
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    classes, counts = np.unique(y, return_counts=True)
    for c, m in zip(classes, counts):
        if m < folds:
            raise ValueError(f"class {c} has {m} samples, fewer than folds={folds}")
    splits = list(StratifiedKFold(folds, shuffle=True, random_state=seed).split(X, y))
    scores = np.zeros(grid.size)
    for i, s in enumerate(grid):
        accs = []
        for tr, te in splits:
            clf = fit_map(X[tr], y[tr], s, method=method, r=n_components, cfg=cfg)
            accs.append(overall_accuracy(clf.predict(X[te]), y[te]))
        scores[i] = np.mean(accs)
    return scores


def sigma_class_cv(X, y, grid=None, folds=5, n_components=None, method="KECA", seed=0,
                   cfg=None) -> float:
    """Grid value with the best cross-validated MAP accuracy.

    ``n_components=None`` keeps every component of every class.
    """
    X = as_samples(X)
    grid = default_grid(X) if grid is None else check_grid(grid)
    scores = cv_accuracies(X, y, grid, folds, n_components, method, seed, cfg)
    return float(grid[int(np.argmax(scores))])


def select_sigma(rule, X, y=None, *, grid=None, folds=5, method="KECA", seed=0, cfg=None):
    """Dispatch on a rule name (canonical or short alias)."""
    rule = resolve_rule(rule)
    if rule == ML:
        return sigma_ml(X, grid)
    if rule == SILVERMAN:
        return sigma_silverman(X)
    if rule == MEAN_DIST:
        return sigma_mean_dist(X)
    if rule == MEDIAN15:
        return sigma_median15(X)
    if y is None:
        raise ValueError("the ClassCV rule needs labels")
    return sigma_class_cv(X, y, grid, folds, None, method, seed, cfg)
