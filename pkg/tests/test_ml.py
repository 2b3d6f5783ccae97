import numpy as np
import pytest

from floqlind.errors import DataError, DegenerateTrainingError, DimensionError, DomainError, SchemaError
from floqlind.ml import (
    ALGORITHMS, ClassifierSpec, auc_score, dumps, grid_search, loads, metrics, predict, predict_score, roc_curve, train,
)
from floqlind.ml.mlp import init_params, loss_and_grad
from floqlind.ml.trees import bootstrap_indices, fit_tree, forest_score, tree_rngs

SEED = 7


@pytest.fixture(scope="module")
def blobs():
    rng = np.random.default_rng(SEED)
    x = np.vstack([rng.normal(3, 1, (20, 2)), rng.normal(-3, 1, (20, 2))])
    y = np.r_[np.ones(20), np.zeros(20)].astype(int)
    return x, y


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_blobs_training_accuracy(algorithm, blobs):
    model = train(ClassifierSpec(algorithm), blobs, seed=SEED)
    x, y = blobs
    scores = predict_score(model, x)
    assert np.all((scores >= 0) & (scores <= 1))
    assert np.mean(predict(model, x) == y) == 1.0


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_constant_features_predict_majority(algorithm):
    x = np.ones((40, 3))
    y = np.r_[np.ones(28), np.zeros(12)].astype(int)
    model = train(ClassifierSpec(algorithm), (x, y), seed=1)
    assert np.all(predict(model, x) == 1)
    y0 = 1 - y
    model = train(ClassifierSpec(algorithm), (x, y0), seed=1)
    assert np.all(predict(model, x) == 0)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_training_errors_and_determinism(algorithm, blobs):
    x, y = blobs
    with pytest.raises(DegenerateTrainingError):
        train(ClassifierSpec(algorithm), (x, np.ones_like(y)))
    bad = x.copy()
    bad[3, 1] = np.nan
    with pytest.raises(DataError):
        train(ClassifierSpec(algorithm), (bad, y))
    a = train(ClassifierSpec(algorithm), blobs, seed=3)
    b = train(ClassifierSpec(algorithm), blobs, seed=3)
    assert dumps(a) == dumps(b)
    with pytest.raises(DimensionError):
        predict_score(a, np.zeros((2, 5)))


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_serialization_round_trip(algorithm, blobs):
    model = train(ClassifierSpec(algorithm), blobs, seed=2)
    text = dumps(model)
    again = loads(text)
    assert dumps(again) == text
    q = np.random.default_rng(0).normal(0, 3, (50, 2))
    assert np.array_equal(predict_score(again, q), predict_score(model, q))


def test_serialization_rejects_foreign_text():
    with pytest.raises(SchemaError):
        loads("{}")
    with pytest.raises(SchemaError):
        loads("not json")
    with pytest.raises(SchemaError):
        loads('{"format": "floqlind-model", "version": 99}')


def test_knn_k1_memorizes_and_vote_fraction(blobs):
    x, y = blobs
    model = train(ClassifierSpec("knn", {"k": 1}, override=True), blobs)
    assert np.mean(predict(model, x) == y) == 1.0
    xs = np.array([[0.0], [1.0], [2.0], [10.0]])
    ys = np.array([1, 1, 0, 0])
    model = train(ClassifierSpec("knn", {"k": 3}), (xs, ys))
    assert predict_score(model, [[0.9]])[0] == pytest.approx(2 / 3)


def test_forest_of_unanimous_trees():
    x = np.r_[np.zeros(10), np.ones(10)][:, None]
    y = np.r_[np.zeros(10), np.ones(10)].astype(int)
    model = train(ClassifierSpec("random_forest", {"n_trees": 50, "max_depth": 2}), (x, y), seed=0)
    assert np.all(predict_score(model, [[1.0], [5.0]]) == 1.0)


def test_forest_with_one_tree_is_a_bootstrap_tree(blobs):
    x, y = blobs
    model = train(ClassifierSpec("random_forest", {"n_trees": 1, "max_depth": 4}, override=True), blobs, seed=11)
    # forests draw sqrt(d) features per split; with d = 1 that is the full feature set
    x1 = x[:, :1]
    model = train(ClassifierSpec("random_forest", {"n_trees": 1, "max_depth": 4}, override=True), (x1, y), seed=11)
    (rng,) = tree_rngs(11, 1)
    boot = bootstrap_indices(rng, y.size)
    ref = fit_tree(x1[boot], y[boot], max_depth=4)
    (tree,) = model.state
    for name in ("feature", "threshold", "left", "right", "value"):
        assert np.array_equal(getattr(tree, name), getattr(ref, name))
    q = np.linspace(-6, 6, 41)[:, None]
    assert np.array_equal(forest_score(model.state, q), ref.predict_score(q))


def test_tree_depth_cap_and_purity():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(200, 3))
    y = (x[:, 0] * x[:, 1] > 0).astype(int)
    for depth in (1, 3, 6):
        t = fit_tree(x, y, max_depth=depth)
        assert t.depth <= depth
    deep = fit_tree(x, y, max_depth=50)
    assert np.array_equal((deep.predict_score(x) >= 0.5).astype(int), y)


def test_lda_midpoint_symmetry():
    rng = np.random.default_rng(3)
    half = rng.normal(size=(25, 2))
    x = np.vstack([half + [2, 1], -half - [2, 1]])
    y = np.r_[np.ones(25), np.zeros(25)].astype(int)
    model = train(ClassifierSpec("lda"), (x, y))
    assert predict_score(model, [[0.0, 0.0]])[0] == pytest.approx(0.5, abs=1e-6)


def test_mlp_gradient_check():
    rng = np.random.default_rng(4)
    params = init_params([3, 8, 6, 1], rng)
    for p in params[1::2]:
        p += rng.normal(0, 0.1, p.shape)
    x = rng.normal(size=(5, 3))
    y = np.array([1.0, 0.0, 1.0, 1.0, 0.0])
    _, grads = loss_and_grad(params, x, y)
    h = 1e-6
    for p, g in zip(params, grads):
        num = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up, _ = loss_and_grad(params, x, y)
            p[idx] = old - h
            down, _ = loss_and_grad(params, x, y)
            p[idx] = old
            num[idx] = (up - down) / (2 * h)
        rel = np.linalg.norm(num - g) / max(np.linalg.norm(num) + np.linalg.norm(g), 1e-12)
        assert rel < 1e-5


def test_spec_ranges():
    with pytest.raises(DomainError):
        ClassifierSpec("knn", {"k": 1})
    with pytest.raises(DomainError):
        ClassifierSpec("random_forest", {"n_trees": 10})
    with pytest.raises(DomainError):
        ClassifierSpec("mlp", {"hidden": [1024, 8]})
    with pytest.raises(DomainError):
        ClassifierSpec("svm")
    with pytest.raises(DomainError):
        ClassifierSpec("knn", {"depth": 3})
    assert ClassifierSpec("knn", {"k": 1}, override=True).hyperparameters["k"] == 1


def test_grid_search_prefers_smaller_model_on_ties(blobs):
    x, y = blobs
    res = grid_search("decision_tree", blobs, blobs, grid={"max_depth": [9, 3, 6]})
    assert res.validation_accuracy == 1.0
    assert res.model.spec.hyperparameters["max_depth"] == 3
    assert len(res.table) == 3


# -- metrics -----------------------------------------------------------------

def test_metrics_hand_example():
    r = metrics([1, 1, 0, 0], [0.9, 0.4, 0.6, 0.1])
    assert r.accuracy == 0.5 and r.precision == 0.5 and r.recall == 0.5 and r.f1 == 0.5
    assert r.auc == pytest.approx(0.75)
    assert r.confusion.tolist() == [[1, 1], [1, 1]]


def test_metrics_perfect_and_always_yes():
    r = metrics([1, 0, 1, 0], [1, 0, 1, 0])
    assert r.accuracy == r.f1 == r.auc == 1.0
    y = np.r_[np.ones(70), np.zeros(30)].astype(int)
    r = metrics(y, np.ones(100))
    assert r.accuracy == pytest.approx(0.7)
    assert r.auc == pytest.approx(0.5)


def test_auc_absent_for_one_class():
    assert auc_score([1, 1, 1], [0.2, 0.4, 0.9]) is None
    assert metrics([0, 0], [0.1, 0.7]).auc is None


def test_auc_equals_trapezoid_roc_with_ties():
    rng = np.random.default_rng(5)
    for _ in range(30):
        y = rng.integers(0, 2, 40)
        if y.min() == y.max():
            continue
        s = rng.integers(0, 5, 40) / 4.0  # many ties
        fpr, tpr = roc_curve(y, s)
        assert auc_score(y, s) == pytest.approx(np.trapezoid(tpr, fpr), abs=1e-12)


def test_auc_monotone_invariance():
    rng = np.random.default_rng(6)
    for _ in range(50):
        y = rng.integers(0, 2, 60)
        if y.min() == y.max():
            continue
        s = rng.uniform(size=60)
        a, b = rng.uniform(0.1, 5, 2)
        transformed = np.tanh(a * s + b) + s**3
        assert auc_score(y, transformed) == pytest.approx(auc_score(y, s), abs=1e-12)


def test_f1_positive_class_fixed():
    y = np.array([1, 1, 1, 0, 0, 1])
    s = np.array([0.9, 0.8, 0.2, 0.7, 0.1, 0.6])
    r = metrics(y, s)
    flipped = metrics(1 - y, 1 - s + 1e-12)
    assert r.accuracy == pytest.approx(flipped.accuracy)
    assert r.f1 != pytest.approx(flipped.f1)
    assert r.f1 == pytest.approx(2 * 3 / (2 * 3 + 1 + 1))


def test_metrics_validation():
    with pytest.raises(DimensionError):
        metrics([1, 0], [0.5])
    with pytest.raises(DataError):
        metrics([2, 0], [0.5, 0.1])
