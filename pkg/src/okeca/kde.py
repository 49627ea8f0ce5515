"""Parzen and reduced-rank kernel density estimation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_samples
from .keca import KECA, EntropyModel
from .kernel import KernelModel, cross_kernel


def parzen_pdf(kernel: KernelModel, query) -> np.ndarray:
    """Mean of normalized kernel bumps, ``1^T k* / n``."""
    if not kernel.normalized:
        raise ValueError("parzen_pdf needs a density-normalized kernel")
    return cross_kernel(kernel, query).mean(axis=0)


def normalized_basis(model: EntropyModel, r):
    """Columns spanning the retained components, each of unit length.

    KECA uses the entropy-sorted eigenvectors themselves; OKECA uses the
    leading columns of B divided by their norms. Columns of zero norm stay zero.
    """
    if model.method == KECA:
        E = model.eig.eigenvectors[:, model.order[:r]]
        return E, np.sqrt(model.eig.eigenvalues[model.order[:r]])
    B = model.basis[:, :r]
    norms = np.linalg.norm(B, axis=0)
    E = np.zeros_like(B)
    nz = norms > 0
    E[:, nz] = B[:, nz] / norms[nz]
    return E, norms


@dataclass(frozen=True)
class DensityEstimate:
    """Reduced-rank density estimate from the ``r`` leading components of a model.

    Attributes
    ----------
    projector : ndarray of shape (n, n)
        ``E_r E_r^T`` for the unit-normalized retained basis.
    column_norms : ndarray of shape (r,)
        Norms of the retained basis columns (the diagonal scaling paired
        with the normalized basis).
    """

    model: EntropyModel
    r: int
    projector: np.ndarray = field(init=False, repr=False)
    column_norms: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        r = int(self.r)
        if not 1 <= r <= self.model.n:
            raise ValueError(f"r must lie in [1, {self.model.n}], got {self.r}")
        object.__setattr__(self, "r", r)
        E, norms = normalized_basis(self.model, r)
        P = E @ E.T
        object.__setattr__(self, "projector", 0.5 * (P + P.T))
        object.__setattr__(self, "column_norms", norms)
        # 1^T E_r E_r^T / n, so evaluation is one dot product per query
        object.__setattr__(self, "weights", (E @ E.sum(axis=0)) / self.model.n)

    @property
    def kernel(self):
        return KernelModel(self.model.sigma, self.model.train, normalized=True)

    def raw_pdf(self, query):
        """Unclamped values; truncation can make them slightly negative."""
        return self.weights @ cross_kernel(self.kernel, query)

    def pdf(self, query):
        return np.maximum(self.raw_pdf(query), 0.0)


def reduced_pdf(est: DensityEstimate, query, *, clamp=True) -> np.ndarray:
    return est.pdf(query) if clamp else est.raw_pdf(query)


@dataclass(frozen=True)
class PdfGrid:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(ys), len(xs)), row-major over y then x

    @property
    def bounds(self):
        return [float(self.xs[0]), float(self.xs[-1]), float(self.ys[0]), float(self.ys[-1])]

    def rows(self):
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.column_stack([X.ravel(), Y.ravel(), self.values.ravel()])

    def to_dict(self):
        return {
            "bounds": self.bounds,
            "resolution": int(len(self.xs)),
            "values": self.values.tolist(),
        }


def grid_points(bounds, resolution):
    xmin, xmax, ymin, ymax = map(float, bounds)
    resolution = int(resolution)
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    X, Y = np.meshgrid(xs, ys)
    return xs, ys, np.column_stack([X.ravel(), Y.ravel()])


def pdf_grid(est_or_kernel, bounds, resolution) -> PdfGrid:
    """Evaluate a 2-D density on a regular grid.

    ``est_or_kernel`` is a :class:`DensityEstimate` or a normalized
    :class:`KernelModel` (plain Parzen). ``bounds`` is ``(xmin, xmax, ymin, ymax)``.
    """
    d = est_or_kernel.model.d if isinstance(est_or_kernel, DensityEstimate) else est_or_kernel.d
    if d != 2:
        raise ValueError(f"pdf grids need 2-D data, got d={d}")
    xs, ys, pts = grid_points(bounds, resolution)
    if isinstance(est_or_kernel, DensityEstimate):
        values = est_or_kernel.pdf(pts)
    else:
        values = parzen_pdf(est_or_kernel, pts)
    return PdfGrid(xs, ys, values.reshape(len(ys), len(xs)))


def data_bounds(X, margin=0.25):
    X = as_samples(X)
    lo, hi = X.min(axis=0), X.max(axis=0)
    pad = margin * np.maximum(hi - lo, 1e-12)
    return (lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1])
