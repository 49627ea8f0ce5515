import numpy as np
import pytest
from sklearn.base import clone
from sklearn.model_selection import GridSearchCV
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from okeca import KECA, OKECA, EntropyMAPClassifier, ReducedRankKDE
from okeca.data import gen_ring, gen_two_moons, split
from okeca.kde import parzen_pdf
from okeca.keca import cumulative_ip, fit_keca, transform
from okeca.kernel import KernelModel


def test_params_and_clone():
    est = OKECA(n_components=3, sigma=0.4, rel_tol=1e-10, random_state=7)
    params = est.get_params()
    assert params["n_components"] == 3 and params["rel_tol"] == 1e-10
    twin = clone(est)
    assert twin.get_params() == params and not hasattr(twin, "model_")


def test_keca_matches_functional_api():
    X = gen_ring(60, seed=0).X
    est = KECA(n_components=3, sigma=0.3).fit(X)
    model = fit_keca(X, 0.3)
    np.testing.assert_allclose(est.transform(X[:5]), transform(model, X[:5], 3))
    assert est.cumulative_ip(2) == cumulative_ip(model, 2) / model.total_ip
    assert est.fit_transform(X).shape == (60, 3)


def test_rule_names_resolve():
    X = gen_ring(40, seed=1).X
    assert KECA(sigma="d2").fit(X).sigma_ > 0
    with pytest.raises(ValueError):
        KECA(sigma="bogus").fit(X)


def test_okeca_first_component_carries_all_entropy():
    X = gen_ring(50, seed=2).X
    est = OKECA(sigma=0.5).fit(X)
    assert est.cumulative_ip(1) == pytest.approx(1.0, rel=1e-6)


def test_kde_estimator():
    X = gen_ring(60, seed=3).X
    kde = ReducedRankKDE(n_components=None, sigma=0.3, method="KECA").fit(X)
    q = np.random.default_rng(0).uniform(-1.5, 1.5, size=(20, 2))
    ref = parzen_pdf(KernelModel(0.3, X, normalized=True), q)
    np.testing.assert_allclose(kde.pdf(q), ref, rtol=1e-8, atol=1e-12)
    np.testing.assert_allclose(kde.parzen_pdf(q), ref)
    with np.errstate(divide="ignore"):
        np.testing.assert_allclose(kde.score_samples(q), np.log(kde.pdf(q)))


def test_classifier_in_pipeline_and_grid_search():
    tr, te = split(gen_two_moons(150, 0.1, seed=5), 30, 100, seed=5)
    pipe = make_pipeline(StandardScaler(), EntropyMAPClassifier(n_components=2, sigma="ML"))
    pipe.fit(tr.X, tr.y)
    assert pipe.score(te.X, te.y) > 0.8
    gs = GridSearchCV(EntropyMAPClassifier(method="KECA"), {"n_components": [1, 3], "sigma": [0.2, 0.5]}, cv=3)
    gs.fit(tr.X, tr.y)
    assert gs.best_params_["sigma"] in (0.2, 0.5)


def test_classifier_string_labels_and_proba():
    tr, te = split(gen_two_moons(80, 0.1, seed=6), 20, 50, seed=6)
    names = np.array(["upper", "lower"])
    clf = EntropyMAPClassifier(sigma=0.3).fit(tr.X, names[tr.y])
    assert set(clf.predict(te.X)) <= set(names)
    proba = clf.predict_proba(np.vstack([te.X, [[1e3, 1e3]]]))
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    np.testing.assert_allclose(proba[-1], [0.5, 0.5])


def test_class_cv_sigma():
    tr, _ = split(gen_two_moons(60, 0.1, seed=8), 20, 10, seed=8)
    clf = EntropyMAPClassifier(sigma="class", method="KECA").fit(tr.X, tr.y)
    assert clf.sigma_ > 0
