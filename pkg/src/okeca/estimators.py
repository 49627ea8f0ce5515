"""scikit-learn compatible wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import bandwidth
from .classify import fit_map
from .kde import DensityEstimate, parzen_pdf
from .keca import KECA as _KECA, OKECA as _OKECA, cumulative_ip, fit_keca, transform
from .kernel import KernelModel
from .rotation import AscentConfig, fit_okeca


def _resolve_sigma(sigma, X, y=None, method=_KECA, seed=0, cfg=None):
    if isinstance(sigma, str):
        return bandwidth.select_sigma(sigma, X, y, method=method, seed=seed, cfg=cfg)
    return float(sigma)


class KECA(TransformerMixin, BaseEstimator):
    """Kernel entropy component analysis.

    Parameters
    ----------
    n_components : int or None, default=2
        Number of entropy-sorted components returned by ``transform``.
        None keeps all of them.
    sigma : float or str, default="ML"
        Gaussian length-scale, or the name of a selection rule
        (``"ML"``, ``"Silverman"``, ``"MeanDist"``, ``"Median15"`` or their
        short forms ``ml``, ``silv``, ``d1``, ``d2``).

    Attributes
    ----------
    model_ : EntropyModel
    sigma_ : float
    entropy_values_ : ndarray of shape (n_samples,)
        Sorted descending.
    """

    _method = _KECA

    def __init__(self, n_components=2, sigma="ML"):
        self.n_components = n_components
        self.sigma = sigma

    def _fit_model(self, X, sigma):
        return fit_keca(X, sigma)

    def _config(self):
        return None

    def fit(self, X, y=None):
        X = check_array(X)
        self.sigma_ = _resolve_sigma(self.sigma, X)
        self.model_ = self._fit_model(X, self.sigma_)
        self.entropy_values_ = self.model_.entropy_values
        self.n_features_in_ = X.shape[1]
        return self

    def _n_out(self):
        n = self.model_.n
        return n if self.n_components is None else min(int(self.n_components), n)

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return transform(self.model_, X, self._n_out())

    def cumulative_ip(self, n_components=None):
        """Retained share of ``1^T K 1`` for the leading components."""
        check_is_fitted(self, "model_")
        k = self._n_out() if n_components is None else n_components
        return cumulative_ip(self.model_, k) / self.model_.total_ip


class OKECA(KECA):
    """KECA followed by a rotation that packs the information potential into few components.

    Parameters
    ----------
    n_components : int or None, default=2
    sigma : float or str, default="ML"
    tau : float or None, default=None
        Gradient step; None uses ``0.5 / ||g||^2``.
    max_iters : int, default=1000
    rel_tol : float, default=1e-8
    random_state : int, default=0
        Seeds the per-component initial directions.
    """

    _method = _OKECA

    def __init__(self, n_components=2, sigma="ML", tau=None, max_iters=1000, rel_tol=1e-8,
                 random_state=0):
        super().__init__(n_components=n_components, sigma=sigma)
        self.tau = tau
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.random_state = random_state

    def _config(self):
        return AscentConfig(self.tau, self.max_iters, self.rel_tol, self.random_state)

    def _fit_model(self, X, sigma):
        return fit_okeca(X, sigma, self._config())


class ReducedRankKDE(BaseEstimator):
    """Density estimate through the ``n_components`` leading KECA/OKECA components.

    ``n_components=None`` with ``method="KECA"`` is the plain Parzen estimate.
    """

    def __init__(self, n_components=1, sigma="ML", method="OKECA", random_state=0):
        self.n_components = n_components
        self.sigma = sigma
        self.method = method
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X)
        self.sigma_ = _resolve_sigma(self.sigma, X)
        cfg = AscentConfig(seed=self.random_state)
        model = fit_okeca(X, self.sigma_, cfg) if self.method == _OKECA else fit_keca(X, self.sigma_)
        r = model.n if self.n_components is None else int(self.n_components)
        self.estimate_ = DensityEstimate(model, r)
        self.n_features_in_ = X.shape[1]
        return self

    def pdf(self, X):
        check_is_fitted(self, "estimate_")
        return self.estimate_.pdf(check_array(X))

    def parzen_pdf(self, X):
        check_is_fitted(self, "estimate_")
        return parzen_pdf(KernelModel(self.sigma_, self.estimate_.model.train, True), check_array(X))

    def score_samples(self, X):
        """Log density; ``-inf`` where the clamped estimate is zero."""
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(X))


class EntropyMAPClassifier(ClassifierMixin, BaseEstimator):
    """MAP classifier over per-class reduced-rank densities.

    ``sigma`` may also be ``"ClassCV"`` (or ``"class"``), selected by
    ``cv_folds``-fold cross-validation with every component retained.
    """

    def __init__(self, n_components=1, sigma="ML", method="OKECA", cv_folds=5, random_state=0):
        self.n_components = n_components
        self.sigma = sigma
        self.method = method
        self.cv_folds = cv_folds
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        cfg = AscentConfig(seed=self.random_state)
        if isinstance(self.sigma, str) and bandwidth.resolve_rule(self.sigma) == bandwidth.CLASS_CV:
            self.sigma_ = bandwidth.sigma_class_cv(
                X, y_idx, folds=self.cv_folds, method=self.method, seed=self.random_state, cfg=cfg
            )
        else:
            self.sigma_ = _resolve_sigma(self.sigma, X)
        self.model_ = fit_map(X, y_idx, self.sigma_, self.method, self.n_components, cfg)
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        """Posterior class probabilities; rows with all-zero densities fall back to the priors."""
        check_is_fitted(self, "model_")
        joint = self.model_.class_densities(check_array(X)) * self.model_.priors
        total = joint.sum(axis=1, keepdims=True)
        out = np.tile(self.model_.priors, (joint.shape[0], 1))
        ok = total[:, 0] > 0
        out[ok] = joint[ok] / total[ok]
        return out

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.classes_[self.model_.predict(check_array(X))]
