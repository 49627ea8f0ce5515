"""Synthetic datasets, CSV ingestion, noise injection and stratified splits.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import as_samples


class CSVParseError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    """Samples with optional integer labels in ``[0, n_classes)``.

    ``class_names`` maps label ids back to the original category values
    when the dataset was loaded from text.
    """

    X: np.ndarray
    y: np.ndarray | None = None
    class_names: tuple = field(default=())

    def __post_init__(self):
        X = as_samples(self.X)
        X.setflags(write=False)
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.asarray(self.y)
            if y.shape != (X.shape[0],):
                raise ValueError(f"labels must have shape ({X.shape[0]},), got {y.shape}")
            if not np.issubdtype(y.dtype, np.integer):
                raise ValueError("labels must be integers")
            present = np.unique(y)
            if present[0] < 0 or not np.array_equal(present, np.arange(present.size)):
                raise ValueError("labels must be dense class ids 0..n_classes-1")
            y = y.astype(np.int64)
            y.setflags(write=False)
            object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def labeled(self):
        return self.y is not None

    @property
    def n_classes(self):
        return 0 if self.y is None else int(self.y.max()) + 1

    def subset(self, idx):
        return Dataset(self.X[idx], None if self.y is None else self.y[idx], self.class_names)


def gen_ring(n, inner_radius=0.8, outer_radius=1.2, seed=0) -> Dataset:
    """Points with radius uniform in ``[inner, outer]`` and uniform angle."""
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 < inner_radius < outer_radius:
        raise ValueError(f"need 0 < inner_radius < outer_radius, got {inner_radius}, {outer_radius}")
    rng = np.random.default_rng(seed)
    radius = rng.uniform(inner_radius, outer_radius, n)
    angle = rng.uniform(0.0, 2.0 * np.pi, n)
    return Dataset(np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]))


def gen_two_moons(n_per_class, noise_std=0.0, seed=0) -> Dataset:
    """Two interleaved unit half-circles.

    Class 0 is the upper arc ``(cos t, sin t)``; class 1 is the mirrored arc
    ``(cos t, -sin t)`` shifted by ``(1, 0.5)``; ``t`` is uniform on ``[0, pi]``.
    """
    n_per_class = int(n_per_class)
    if n_per_class < 1:
        raise ValueError(f"n_per_class must be >= 1, got {n_per_class}")
    if noise_std < 0:
        raise ValueError(f"noise_std must be >= 0, got {noise_std}")
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, np.pi, (2, n_per_class))
    upper = np.column_stack([np.cos(t[0]), np.sin(t[0])])
    lower = np.column_stack([np.cos(t[1]) + 1.0, 0.5 - np.sin(t[1])])
    X = np.vstack([upper, lower])
    if noise_std > 0:
        X = X + rng.normal(0.0, noise_std, X.shape)
    y = np.repeat([0, 1], n_per_class)
    return Dataset(X, y)


def gen_pinwheel(n_per_class, n_classes=2, twist=0.3, seed=0, radial_std=0.3,
                 tangential_std=0.05) -> Dataset:
    """Radial arms bent by an angle offset proportional to the radius.

    Arm ``c`` starts on the axis at angle ``2 pi c / n_classes``. A point at
    radius ``rho`` (``|1 + radial_std * N(0,1)|``) with tangential offset
    ``v`` is rotated by an extra ``twist * rho * 2 pi``.
    """
    n_per_class, n_classes = int(n_per_class), int(n_classes)
    if n_classes < 2:
        raise ValueError(f"n_classes must be >= 2, got {n_classes}")
    if n_per_class < 1:
        raise ValueError(f"n_per_class must be >= 1, got {n_per_class}")
    rng = np.random.default_rng(seed)
    m = n_per_class * n_classes
    rho = np.abs(1.0 + radial_std * rng.standard_normal(m))
    v = tangential_std * rng.standard_normal(m)
    y = np.repeat(np.arange(n_classes), n_per_class)
    phi = 2.0 * np.pi * y / n_classes + twist * rho * 2.0 * np.pi
    c, s = np.cos(phi), np.sin(phi)
    X = np.column_stack([rho * c - v * s, rho * s + v * c])
    return Dataset(X, y)


def add_gaussian_noise(data: Dataset, sigma_n, seed=0) -> Dataset:
    """Add i.i.d. ``N(0, sigma_n^2)`` to every entry."""
    if sigma_n < 0:
        raise ValueError(f"sigma_n must be >= 0, got {sigma_n}")
    if sigma_n == 0:
        return data
    rng = np.random.default_rng(seed)
    return Dataset(data.X + rng.normal(0.0, sigma_n, data.X.shape), data.y, data.class_names)


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column=None, drop_columns=()) -> Dataset:
    """Read a comma-separated numeric table.

    A header is assumed when the first row has a non-numeric feature cell.
    Label cells may be integers or arbitrary strings; either way they are
    mapped to dense ids in order of first appearance.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if r and any(c.strip() for c in r)]
    if not rows:
        raise CSVParseError(f"{path}: file is empty")

    width = len(rows[0][1])
    label_idx = None
    if label_column is not None:
        label_idx = label_column % width if -width <= label_column < width else None
        if label_idx is None:
            raise CSVParseError(f"{path}: label column {label_column} out of range for {width} columns")
    drop = {c % width for c in drop_columns}
    feature_cols = [j for j in range(width) if j != label_idx and j not in drop]

    first = rows[0][1]
    if any(not _is_number(first[j].strip()) for j in feature_cols):
        rows = rows[1:]
        if not rows:
            raise CSVParseError(f"{path}: only a header row")

    features, labels = [], []
    for line, row in rows:
        if len(row) != width:
            raise CSVParseError(f"{path}: line {line} has {len(row)} fields, expected {width}")
        vals = []
        for j in feature_cols:
            cell = row[j].strip()
            try:
                vals.append(float(cell))
            except ValueError:
                raise CSVParseError(
                    f"{path}: line {line}, column {j}: non-numeric value {cell!r}"
                ) from None
        features.append(vals)
        if label_idx is not None:
            labels.append(row[label_idx].strip())

    X = np.array(features, dtype=float)
    if label_idx is None:
        return Dataset(X)
    ids = {}
    y = np.array([ids.setdefault(v, len(ids)) for v in labels], dtype=np.int64)
    return Dataset(X, y, tuple(ids))


def _per_class(count, n_classes, name):
    counts = np.broadcast_to(np.asarray(count, dtype=int), (n_classes,)).copy()
    if np.any(counts < 0):
        raise ValueError(f"{name} counts must be >= 0")
    return counts


def split(data: Dataset, n_train_per_class, n_test_per_class, seed=0):
    """Disjoint stratified train/test subsets.

    Counts are either one integer for every class or one per class id.
    """
    if not data.labeled:
        raise ValueError("split needs a labeled dataset")
    k = data.n_classes
    n_tr = _per_class(n_train_per_class, k, "train")
    n_te = _per_class(n_test_per_class, k, "test")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in range(k):
        idx = np.flatnonzero(data.y == c)
        if idx.size < n_tr[c] + n_te[c]:
            raise ValueError(
                f"class {c} has {idx.size} samples, needs {n_tr[c]} train + {n_te[c]} test"
            )
        idx = rng.permutation(idx)
        train.append(idx[: n_tr[c]])
        test.append(idx[n_tr[c]: n_tr[c] + n_te[c]])
    train, test = np.concatenate(train), np.concatenate(test)
    return data.subset(train), data.subset(test)


def balanced_counts(total, n_classes):
    """Spread ``total`` over classes as evenly as possible, remainder to low ids."""
    base, extra = divmod(int(total), int(n_classes))
    return np.array([base + (c < extra) for c in range(n_classes)])
