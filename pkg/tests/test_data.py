import numpy as np
import pytest

from okeca import data
from okeca.data import CSVParseError, Dataset


def test_ring_radii():
    ds = data.gen_ring(80, 0.8, 1.2, seed=1)
    r = np.linalg.norm(ds.X, axis=1)
    assert ds.X.shape == (80, 2)
    assert np.all((r >= 0.8) & (r <= 1.2))


def test_ring_single_point():
    ds = data.gen_ring(1, 1.0, 1.0 + 1e-9, seed=0)
    assert np.linalg.norm(ds.X[0]) == pytest.approx(1.0, abs=1e-8)


def test_ring_deterministic_and_errors():
    a, b = data.gen_ring(1000, seed=42), data.gen_ring(1000, seed=42)
    assert np.array_equal(a.X, b.X)
    for kw in ({"n": 0}, {"n": 5, "inner_radius": 1.2, "outer_radius": 0.8},
               {"n": 5, "inner_radius": 0.0, "outer_radius": 1.0}):
        with pytest.raises(ValueError):
            data.gen_ring(**kw)


def test_moons_noiseless_on_arcs():
    ds = data.gen_two_moons(20, 0.0, seed=3)
    up, low = ds.X[ds.y == 0], ds.X[ds.y == 1]
    assert ds.n == 40 and np.bincount(ds.y).tolist() == [20, 20]
    np.testing.assert_allclose(np.hypot(*up.T), 1.0, atol=1e-14)
    assert np.all(up[:, 1] >= 0)
    np.testing.assert_allclose(np.hypot(low[:, 0] - 1.0, low[:, 1] - 0.5), 1.0, atol=1e-14)
    assert np.all(low[:, 1] <= 0.5)


def test_moons_jitter_std():
    clean = data.gen_two_moons(25, 0.0, seed=7)
    noisy = data.gen_two_moons(25, 0.051, seed=7)
    assert noisy.n == 50
    diff = noisy.X - clean.X
    for c in (0, 1):
        assert abs(diff[noisy.y == c].std() - 0.051) <= 0.02


def test_moons_not_linearly_separable():
    ds = data.gen_two_moons(500, 0.05, seed=9)
    A = np.column_stack([ds.X, np.ones(ds.n)])
    coef, *_ = np.linalg.lstsq(A, 2.0 * ds.y - 1.0, rcond=None)
    acc = np.mean((A @ coef > 0) == (ds.y == 1))
    assert acc < 1.0


def test_moons_negative_noise():
    with pytest.raises(ValueError):
        data.gen_two_moons(5, -0.1)


def test_pinwheel_shapes():
    ds = data.gen_pinwheel(45, 2, twist=0.3, seed=5)
    assert ds.X.shape == (90, 2) and ds.n_classes == 2
    assert np.array_equal(ds.X, data.gen_pinwheel(45, 2, twist=0.3, seed=5).X)


def test_pinwheel_zero_twist_on_axes():
    ds = data.gen_pinwheel(1, 2, twist=0.0, seed=0, tangential_std=0.0)
    assert ds.n == 2
    np.testing.assert_allclose(ds.X[:, 1], 0.0, atol=1e-15)
    assert ds.X[0, 0] > 0 > ds.X[1, 0]


def test_pinwheel_distinct_centroids():
    ds = data.gen_pinwheel(100, 3, twist=0.25, seed=2)
    cents = np.array([ds.X[ds.y == c].mean(axis=0) for c in range(3)])
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.linalg.norm(cents[i] - cents[j]) > 1e-3


def test_pinwheel_needs_two_classes():
    with pytest.raises(ValueError):
        data.gen_pinwheel(5, 1)


def test_noise_identity_and_seeds():
    ds = data.gen_ring(50, seed=0)
    assert np.array_equal(data.add_gaussian_noise(ds, 0.0, seed=1).X, ds.X)
    a = data.add_gaussian_noise(ds, 0.05, seed=1)
    b = data.add_gaussian_noise(ds, 0.05, seed=2)
    assert not np.array_equal(a.X, b.X)
    with pytest.raises(ValueError):
        data.add_gaussian_noise(ds, -1.0)


def test_noise_std():
    ds = data.gen_ring(5000, seed=0)  # n * d = 10^4
    diff = data.add_gaussian_noise(ds, 0.091, seed=4).X - ds.X
    assert abs(diff.std() - 0.091) <= 0.1 * 0.091


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset([[np.nan, 1.0]])
    with pytest.raises(ValueError):
        Dataset([[0.0], [1.0]], [0, 2])
    with pytest.raises(ValueError):
        Dataset([[0.0], [1.0]], [0])


def test_load_csv_with_string_labels(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("1,2,a\n3,4,b\n5,6,a\n")
    ds = data.load_csv(p, label_column=2)
    assert (ds.n, ds.d) == (3, 2)
    assert ds.y.tolist() == [0, 1, 0]
    assert ds.class_names == ("a", "b")


def test_load_csv_first_appearance_mapping(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("f1,f2,label\n0.5,1,7\n1.5,2,3\n2.5,3,7\n")
    ds = data.load_csv(p, label_column=-1)
    assert ds.n == 3 and ds.y.tolist() == [0, 1, 0] and ds.class_names == ("7", "3")
    assert data.load_csv(p).d == 3


def test_load_csv_errors(tmp_path):
    ragged = tmp_path / "r.csv"
    ragged.write_text("1,2,3\n4,5\n")
    with pytest.raises(CSVParseError, match="line 2"):
        data.load_csv(ragged)
    bad = tmp_path / "b.csv"
    bad.write_text("1,2\n3,x\n")
    with pytest.raises(CSVParseError, match="line 2, column 1"):
        data.load_csv(bad)
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(CSVParseError, match="empty"):
        data.load_csv(empty)


def test_split_infeasible():
    ds = data.gen_two_moons(500, 0.05, seed=1)
    with pytest.raises(ValueError, match="class 0"):
        data.split(ds, 20, 500, seed=1)


def test_split_sizes_disjoint_deterministic():
    ds = data.gen_two_moons(600, 0.05, seed=1)
    tr, te = data.split(ds, 20, 500, seed=1)
    assert (tr.n, te.n) == (40, 1000)
    assert np.bincount(tr.y).tolist() == [20, 20] and np.bincount(te.y).tolist() == [500, 500]
    rows = lambda d: {tuple(r) for r in d.X}  # noqa: E731
    assert not rows(tr) & rows(te)
    tr2, te2 = data.split(ds, 20, 500, seed=1)
    assert np.array_equal(tr.X, tr2.X) and np.array_equal(te.X, te2.X)


def test_split_per_class_counts():
    ds = data.gen_pinwheel(40, 3, seed=0)
    tr, te = data.split(ds, data.balanced_counts(10, 3), [5, 6, 7], seed=0)
    assert np.bincount(tr.y).tolist() == [4, 3, 3]
    assert np.bincount(te.y).tolist() == [5, 6, 7]
