import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homograph.errors import ConfigError, DegenerateLabels, DimensionMismatch, VersionError
from homograph.learners import Algorithm, LearnerSpec, fit, load_model, predict, \
    predict_score, save_model, validate_model
from homograph.learners.ensembles import _log_loss
from homograph.learners.tree import Tree, check_tree, unpack_trees

ALL = list(Algorithm)
SEP_X = np.array([[0.0], [1.0], [10.0], [11.0]])
SEP_Y = np.array([0, 0, 1, 1])


def noisy_fixture(seed, n=120, d=5):
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.random(n), (rng.random((n, d - 1)) < 0.3).astype(float)])
    logit = 4 * X[:, 0] - 2 + 1.5 * X[:, 1] - X[:, 2]
    y = (rng.random(n) < 1 / (1 + np.exp(-logit))).astype(int)
    return X, y


def small_spec(algo, **kw):
    kw.setdefault("n_estimators", 15)
    return LearnerSpec(algo, **kw)


# ------------------------------------------------------------ fixed cases

def test_separable_tree_single_split():
    model = fit(LearnerSpec("decision_tree"), SEP_X, SEP_Y)
    (tree,) = unpack_trees(model.params)
    assert tree.n_nodes == 3
    assert tree.threshold[0] == 5.5
    assert predict(model, SEP_X).tolist() == SEP_Y.tolist()
    assert predict(model, np.array([[0.0]])).tolist() == [0]


def test_adaboost_stops_after_perfect_stump():
    model = fit(LearnerSpec("adaboost", n_estimators=50), SEP_X, SEP_Y)
    assert model.info["n_stages"] == 1
    assert model.info["stage_errors"] == [0.0]
    w = model.params["estimator_weights"]
    assert w.shape == (50,) and np.count_nonzero(w) == 1
    assert predict(model, SEP_X).tolist() == SEP_Y.tolist()


def test_constant_data_forest_votes_are_unanimous():
    X = np.ones((9, 3))
    y = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1])
    model = fit(LearnerSpec("random_forest", n_estimators=7, bootstrap=False), X, y)
    assert set(np.unique(predict_score(model, X))) <= {0.0, 1.0}


def test_gaussian_nb_symmetric_point_scores_half():
    X = np.array([[-2.0, 0.0], [-1.0, 1.0], [-3.0, -1.0],
                  [2.0, 0.0], [1.0, 1.0], [3.0, -1.0]])
    y = np.array([0, 0, 0, 1, 1, 1])
    model = fit(LearnerSpec("gaussian_nb"), X, y)
    assert abs(predict_score(model, np.array([[0.0, 0.0]]))[0] - 0.5) <= 1e-9


def test_kneighbors_ties_go_to_lower_row():
    X = np.array([[1.0], [-1.0], [5.0]])
    y = np.array([1, 0, 0])
    model = fit(LearnerSpec("kneighbors", k_neighbors=1), X, y)
    assert predict(model, np.array([[0.0]])).tolist() == [1]
    model = fit(LearnerSpec("kneighbors", k_neighbors=1), X[[1, 0, 2]], y[[1, 0, 2]])
    assert predict(model, np.array([[0.0]])).tolist() == [0]


def test_kneighbors_majority_of_five():
    X = np.arange(10, dtype=float)[:, None]
    y = np.array([0] * 5 + [1] * 5)
    model = fit(LearnerSpec("kneighbors"), X, y)
    assert predict(model, np.array([[1.0], [8.0]])).tolist() == [0, 1]


def test_multinomial_nb_clamps_negative_ssim():
    X = np.array([[-0.5, 1, 0], [0.9, 0, 1], [-0.2, 1, 0], [0.95, 0, 1]])
    y = np.array([0, 1, 0, 1])
    model = fit(LearnerSpec("multinomial_nb"), X, y)
    s = predict_score(model, X)
    assert np.all(np.isfinite(s))
    clamped = X.copy()
    clamped[:, 0] = np.maximum(clamped[:, 0], 0)
    assert np.array_equal(s, predict_score(model, clamped))


def test_bernoulli_nb_binarizes_at_half():
    X = np.array([[0.4, 1], [0.6, 0], [0.3, 1], [0.9, 0]])
    y = np.array([0, 1, 0, 1])
    model = fit(LearnerSpec("bernoulli_nb"), X, y)
    assert np.array_equal(predict_score(model, X), predict_score(model, (X > 0.5) * 1.0))


def test_nearest_centroid():
    model = fit(LearnerSpec("nearest_centroid"), SEP_X, SEP_Y)
    assert predict(model, np.array([[2.0], [9.0]])).tolist() == [0, 1]
    assert predict_score(model, np.array([[5.5]]))[0] == 0.5


# ------------------------------------------------------------ errors/spec

def test_single_class_rejected():
    with pytest.raises(DegenerateLabels):
        fit(LearnerSpec("decision_tree"), SEP_X, np.zeros(4))


def test_non_binary_labels_rejected():
    with pytest.raises(DegenerateLabels):
        fit(LearnerSpec("decision_tree"), SEP_X, np.array([0, 1, 2, 1]))


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        fit(LearnerSpec("decision_tree"), SEP_X, np.array([0, 1, 1]))
    with pytest.raises(DimensionMismatch):
        fit(LearnerSpec("decision_tree"), SEP_X[:1], SEP_Y[:1])
    model = fit(LearnerSpec("decision_tree"), SEP_X, SEP_Y)
    with pytest.raises(DimensionMismatch):
        predict(model, np.zeros((2, 2)))


@pytest.mark.parametrize("kwargs", [{"n_estimators": 0}, {"k_neighbors": 4},
                                    {"k_neighbors": 0}, {"learning_rate": 0},
                                    {"learning_rate": 1.5}, {"algorithm": "svc"}])
def test_spec_invariants(kwargs):
    with pytest.raises(ConfigError):
        LearnerSpec(**kwargs)


def test_algorithm_aliases():
    assert Algorithm.parse("KNN") is Algorithm.KNEIGHBORS
    assert Algorithm.parse("GradientBoost") is Algorithm.GRADIENT_BOOST
    assert Algorithm.parse("extra-trees") is Algorithm.EXTRA_TREES


# ------------------------------------------------------------ properties

@pytest.mark.parametrize("algo", ALL)
def test_seeded_determinism(algo):
    X, y = noisy_fixture(1)
    a = fit(small_spec(algo, rng_seed=11), X, y)
    b = fit(small_spec(algo, rng_seed=11), X, y)
    probe = noisy_fixture(2)[0]
    assert np.array_equal(predict_score(a, probe), predict_score(b, probe))


@pytest.mark.parametrize("algo", ["decision_tree", "gaussian_nb", "multinomial_nb",
                                  "bernoulli_nb", "nearest_centroid"])
def test_row_permutation_invariance(algo):
    X, y = noisy_fixture(3)
    perm = np.random.default_rng(0).permutation(len(y))
    probe = noisy_fixture(4)[0]
    a = predict(fit(LearnerSpec(algo), X, y), probe)
    b = predict(fit(LearnerSpec(algo), X[perm], y[perm]), probe)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradient_boost_loss_never_increases(seed):
    X, y = noisy_fixture(seed, n=200)
    model = fit(LearnerSpec("gradient_boost", n_estimators=100, learning_rate=0.1), X, y)
    loss = model.info["train_loss"]
    assert len(loss) == 101
    assert all(b <= a for a, b in zip(loss, loss[1:]))
    F = np.log(predict_score(model, X) / (1 - predict_score(model, X)))
    assert abs(_log_loss(y, F) - loss[-1]) < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_adaboost_stage_laws(seed):
    X, y = noisy_fixture(seed, n=200)
    model = fit(LearnerSpec("adaboost", n_estimators=60), X, y)
    info = model.info
    accepted = info["stage_errors"][:len(info["weight_sums"])]
    assert all(e < 0.5 for e in accepted)
    assert all(abs(s - 1.0) <= 1e-9 for s in info["weight_sums"])
    w = model.params["estimator_weights"]
    assert w.shape == (60,) and np.all(np.isfinite(w))
    validate_model(model)


def test_single_unbootstrapped_full_forest_equals_tree():
    X, y = noisy_fixture(5)
    tree = fit(LearnerSpec("decision_tree"), X, y)
    forest = fit(LearnerSpec("random_forest", n_estimators=1, bootstrap=False,
                             max_features=X.shape[1]), X, y)
    for k in ("feature", "threshold", "left", "right", "value"):
        assert np.array_equal(tree.params[k], forest.params[k])


def test_forest_defaults():
    X, y = noisy_fixture(6, d=9)
    rf = fit(small_spec("random_forest"), X, y)
    et = fit(small_spec("extra_trees"), X, y)
    bag = fit(small_spec("bagging"), X, y)
    assert rf.info == {"bootstrap": True, "max_features": 3, "splitter": "best"}
    assert et.info == {"bootstrap": False, "max_features": 3, "splitter": "random"}
    assert bag.info == {"bootstrap": True, "max_features": None, "splitter": "best"}


@pytest.mark.parametrize("algo", [a for a in ALL if a not in (
    Algorithm.KNEIGHBORS, Algorithm.GAUSSIAN_NB, Algorithm.MULTINOMIAL_NB,
    Algorithm.BERNOULLI_NB, Algorithm.NEAREST_CENTROID)])
def test_trees_are_well_formed(algo):
    X, y = noisy_fixture(7)
    model = fit(small_spec(algo), X, y)
    validate_model(model)
    for t in unpack_trees(model.params):
        check_tree(t)
        if t.value.shape[1] == 2:
            assert np.allclose(t.value.sum(axis=1), 1.0, atol=1e-9)


def test_check_tree_rejects_malformed():
    leaf = np.array([[0.5, 0.5]] * 3)
    good = Tree(np.array([0, -1, -1]), np.zeros(3), np.array([1, -1, -1]),
                np.array([2, -1, -1]), leaf)
    check_tree(good)
    bad_child = Tree(np.array([0, -1, -1]), np.zeros(3), np.array([1, -1, -1]),
                     np.array([5, -1, -1]), leaf)
    one_child = Tree(np.array([0, -1, -1]), np.zeros(3), np.array([1, -1, -1]),
                     np.array([-1, -1, -1]), leaf)
    cycle = Tree(np.array([0, 0, -1]), np.zeros(3), np.array([1, 1, -1]),
                 np.array([2, 2, -1]), leaf)
    bad_leaf = Tree(np.array([0, -1, -1]), np.zeros(3), np.array([1, -1, -1]),
                    np.array([2, -1, -1]), np.array([[0.5, 0.5], [0.7, 0.7], [1, 0]]))
    for t in (bad_child, one_child, cycle, bad_leaf):
        with pytest.raises(ValueError):
            check_tree(t)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["decision_tree", "bagging", "extra_trees"]))
def test_predict_is_threshold_of_score(seed, algo):
    X, y = noisy_fixture(seed, n=40, d=3)
    if len(np.unique(y)) < 2:
        y[0] = 1 - y[0]
    model = fit(small_spec(algo, n_estimators=5), X, y)
    s = predict_score(model, X)
    assert np.all((s >= 0) & (s <= 1))
    assert np.array_equal(predict(model, X), (s > 0.5).astype(int))


# ------------------------------------------------------------ persistence

@pytest.mark.parametrize("algo", ALL)
def test_model_round_trip(tmp_path, algo):
    X, y = noisy_fixture(8)
    model = fit(small_spec(algo), X, y)
    path = tmp_path / "m.npz"
    save_model(model, path)
    back = load_model(path)
    assert back.spec == model.spec
    assert back.format_version == 1
    probe = noisy_fixture(9)[0]
    assert np.array_equal(predict_score(back, probe), predict_score(model, probe))


def test_unknown_format_version(tmp_path):
    model = fit(LearnerSpec("decision_tree"), SEP_X, SEP_Y)
    model.format_version = 99
    path = tmp_path / "m.npz"
    save_model(model, path)
    with pytest.raises(VersionError):
        load_model(path)


def test_not_a_model_file(tmp_path):
    path = tmp_path / "junk.npz"
    np.savez(path, a=np.zeros(2))
    with pytest.raises(VersionError):
        load_model(path)
