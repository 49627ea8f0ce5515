import math

import numpy as np
import pytest

from okeca import bandwidth as bw
from okeca.data import gen_pinwheel


def brute_force_loo(X, grid):
    """Direct double loop over samples; no shared code with the library."""
    n, d = X.shape
    scores = []
    for s in grid:
        c = (2 * math.pi * s * s) ** (-d / 2)
        total = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(n):
                if j != i:
                    acc += c * math.exp(-float(np.sum((X[i] - X[j]) ** 2)) / (2 * s * s))
            total += math.log(acc / (n - 1)) if acc > 0 else -math.inf
        scores.append(total)
    best = max(scores)
    return grid[scores.index(best)], scores


def test_mean_dist_by_hand():
    assert bw.sigma_mean_dist([[0.0], [1.0], [3.0]]) == pytest.approx(2.0)
    assert bw.sigma_mean_dist([[0.0, 0.0], [3.0, 4.0]]) == pytest.approx(5.0)
    assert bw.sigma_mean_dist([[1.0, 1.0], [1.0, 1.0]]) == 0.0


def test_median15_by_hand():
    assert bw.sigma_median15([[0.0], [1.0], [3.0]]) == pytest.approx(0.3)
    assert bw.sigma_median15([[0.0], [1.0]]) == pytest.approx(0.15)
    # even count: distances {1, 2, 3, 4, 6, 7}, median (3 + 4) / 2
    assert bw.sigma_median15([[0.0], [1.0], [3.0], [7.0]]) == pytest.approx(0.15 * 3.5)


def test_silverman_formula():
    X = np.random.default_rng(3).normal(size=(100, 1))
    X = (X - X.mean()) / X.std(ddof=1)
    assert bw.sigma_silverman(X) == pytest.approx(0.4216846063427499, rel=1e-12)


def test_silverman_matches_independent_evaluation():
    X = gen_pinwheel(15, 3, 0.3, seed=5).X
    n, d = X.shape
    sbar = (X[:, 0].std(ddof=1) + X[:, 1].std(ddof=1)) / 2
    expected = sbar * (4 / (d + 2)) ** (1 / (d + 4)) * n ** (-1 / (d + 4))
    assert bw.sigma_silverman(X) == pytest.approx(expected, rel=1e-12)


def test_silverman_degenerate():
    with pytest.raises(bw.DegenerateDataError):
        bw.sigma_silverman(np.ones((5, 2)))


@pytest.mark.parametrize("rule", [bw.sigma_mean_dist, bw.sigma_median15, bw.sigma_silverman])
@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
def test_homogeneity(rule, alpha, rng):
    X = rng.normal(size=(30, 3))
    assert rule(alpha * X) == pytest.approx(alpha * rule(X), rel=1e-10)


@pytest.mark.parametrize("rule", [bw.sigma_mean_dist, bw.sigma_median15, bw.sigma_silverman])
def test_too_few_samples(rule):
    with pytest.raises(ValueError):
        rule([[1.0, 2.0]])


def test_ml_singleton_grid(rng):
    assert bw.sigma_ml(rng.normal(size=(10, 2)), [0.37]) == 0.37


def test_ml_matches_brute_force_scan():
    X = np.random.default_rng(0).normal(size=(200, 1))
    grid = np.logspace(-2, 1, 50)
    expected, scores = brute_force_loo(X, list(grid))
    assert bw.sigma_ml(X, grid) == expected
    finite = np.isfinite(scores)
    np.testing.assert_allclose(bw.loo_log_likelihood(X, grid)[finite], np.array(scores)[finite], rtol=1e-9)


def test_ml_is_exhaustive_argmax(rng):
    X = rng.normal(size=(40, 2))
    grid = bw.default_grid(X)
    ll = bw.loo_log_likelihood(X, grid)
    s = bw.sigma_ml(X, grid)
    assert s in grid
    assert np.all(ll[list(grid).index(s)] >= ll)


def test_ml_duplicated_data_does_not_increase_sigma():
    X = np.random.default_rng(5).normal(size=(30, 2))
    grid = np.logspace(-2, 1, 50)
    a, _ = brute_force_loo(X, list(grid))
    b, _ = brute_force_loo(np.vstack([X, X]), list(grid))
    assert bw.sigma_ml(X, grid) == a
    assert bw.sigma_ml(np.vstack([X, X]), grid) == b <= a


@pytest.mark.parametrize("grid", [[], [0.1, 0.1], [0.2, 0.1], [-1.0, 1.0]])
def test_bad_grids(grid):
    with pytest.raises(ValueError):
        bw.check_grid(grid)


def two_blobs(seed=0, n=20):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(size=(n, 2)) * 0.3, rng.normal(size=(n, 2)) * 0.3 + [6, 0]])
    return X, np.repeat([0, 1], n)


def test_class_cv_singleton_and_determinism():
    X, y = two_blobs()
    assert bw.sigma_class_cv(X, y, [0.8]) == 0.8
    a = bw.sigma_class_cv(X, y, folds=5, method="OKECA", seed=3)
    b = bw.sigma_class_cv(X, y, folds=5, method="OKECA", seed=3)
    assert a == b


@pytest.mark.parametrize("method", ["KECA", "OKECA"])
def test_class_cv_separable_blobs(method):
    X, y = two_blobs(1)
    grid = np.logspace(-1, 0.5, 8)
    s = bw.sigma_class_cv(X, y, grid, folds=5, method=method, seed=0)
    scores = bw.cv_accuracies(X, y, grid, 5, None, method, 0)
    assert scores[list(grid).index(s)] == 100.0


def test_class_cv_fold_count():
    X, y = two_blobs(n=4)
    with pytest.raises(ValueError, match="fewer than folds"):
        bw.sigma_class_cv(X, y, [1.0], folds=5)
    with pytest.raises(ValueError):
        bw.sigma_class_cv(X, y, [1.0], folds=1)


def test_select_sigma_aliases(rng):
    X = rng.normal(size=(20, 2))
    assert bw.select_sigma("d1", X) == bw.sigma_mean_dist(X)
    assert bw.select_sigma("Median15", X) == bw.sigma_median15(X)
    with pytest.raises(ValueError):
        bw.select_sigma("nope", X)
    with pytest.raises(ValueError):
        bw.select_sigma("class", X)


def test_all_rules_positive_finite(rng):
    X, y = two_blobs(2)
    for rule in bw.RULES:
        s = bw.select_sigma(rule, X, y)
        assert np.isfinite(s) and s > 0
