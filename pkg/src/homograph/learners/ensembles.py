"""Tree learners: single CART tree, averaging ensembles, boosting."""
import math

import numpy as np

from .base import Algorithm
from .tree import (RankedMatrix, build_tree, fit_classification_tree, pack_trees,
                   unpack_trees)
from .._kernels import GINI, MSE


def _child_seeds(seed, n):
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def fit_decision_tree(spec, X, y):
    tree = fit_classification_tree(X, y, max_depth=spec.max_depth)
    return pack_trees([tree]), {"n_nodes": int(tree.n_nodes)}


def fit_averaging(spec, X, y):
    algo = spec.algorithm
    n, d = X.shape
    data = RankedMatrix.encode(X)
    if algo is Algorithm.BAGGING:
        bootstrap, max_features, splitter = True, None, "best"
    elif algo is Algorithm.RANDOM_FOREST:
        bootstrap, max_features, splitter = True, math.ceil(math.sqrt(d)), "best"
    else:
        bootstrap, max_features, splitter = False, math.ceil(math.sqrt(d)), "random"
    if spec.bootstrap is not None:
        bootstrap = spec.bootstrap
    if spec.max_features is not None:
        max_features = spec.max_features
    trees = []
    for seed in _child_seeds(spec.rng_seed, spec.n_estimators):
        rng = np.random.default_rng(seed)
        if bootstrap:
            weights = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
        else:
            weights = np.ones(n)
        trees.append(fit_classification_tree(X, y, weights, spec.max_depth,
                                             max_features, splitter, rng, data))
    return pack_trees(trees), {"bootstrap": bootstrap, "max_features": max_features,
                               "splitter": splitter}


def score_votes(params, X):
    """Fraction of trees voting for class 1."""
    trees = unpack_trees(params)
    votes = np.zeros(X.shape[0])
    for t in trees:
        votes += t.predict_class(X)
    return votes / len(trees)


def fit_adaboost(spec, X, y):
    """Binary SAMME over shallow trees (stumps by default).

    Stops early when a stage's weighted error is 0 (the stage is kept) or at
    least 0.5 (the stage is dropped unless it is the first).
    """
    n = X.shape[0]
    depth = spec.base_max_depth if spec.base_max_depth is not None else 1
    data = RankedMatrix.encode(X)
    w = np.full(n, 1.0 / n)
    trees, alphas, errors, weight_sums = [], [], [], []
    rows = np.arange(n)
    for _ in range(spec.n_estimators):
        tree = build_tree(data, rows, w * (y == 0), w * (y == 1), GINI, depth)
        miss = tree.predict_class(X) != y
        err = float(w[miss].sum())
        errors.append(err)
        if err <= 0.0:
            trees.append(tree)
            alphas.append(1.0)
            break
        if err >= 0.5:
            if not trees:
                trees.append(tree)
                alphas.append(1.0)
            break
        alpha = math.log((1.0 - err) / err)
        trees.append(tree)
        alphas.append(alpha)
        w = w * np.exp(alpha * miss)
        w /= w.sum()
        weight_sums.append(float(w.sum()))
    params = pack_trees(trees)
    weights = np.zeros(spec.n_estimators)
    weights[:len(alphas)] = alphas
    params["estimator_weights"] = weights
    params["n_stages"] = np.array([len(trees)], dtype=np.int64)
    return params, {"stage_errors": errors, "weight_sums": weight_sums,
                    "n_stages": len(trees)}


def score_adaboost(params, X):
    """Weighted share of stages voting for class 1."""
    trees = unpack_trees(params)
    alphas = params["estimator_weights"][:len(trees)]
    votes = np.zeros(X.shape[0])
    for t, a in zip(trees, alphas):
        votes += a * t.predict_class(X)
    return votes / alphas.sum()


def _log_loss(y, F):
    return float(np.mean(np.logaddexp(0.0, F) - y * F))


def fit_gradient_boost(spec, X, y):
    """Log-loss gradient boosting with squared-error regression trees.

    Each stage fits the residual ``y - p`` and moves every leaf by the
    learning rate times the leaf's mean residual.
    """
    n = X.shape[0]
    depth = spec.base_max_depth if spec.base_max_depth is not None else 3
    data = RankedMatrix.encode(X)
    p = y.mean()
    f0 = math.log(p / (1.0 - p))
    F = np.full(n, f0)
    losses = [_log_loss(y, F)]
    trees = []
    rows = np.arange(n)
    ones = np.ones(n)
    for _ in range(spec.n_estimators):
        resid = y - 1.0 / (1.0 + np.exp(-F))
        tree = build_tree(data, rows, ones, resid, MSE, depth)
        F = F + spec.learning_rate * tree.predict_value(X)[:, 0]
        trees.append(tree)
        losses.append(_log_loss(y, F))
    params = pack_trees(trees)
    params["init"] = np.array([f0])
    params["learning_rate"] = np.array([spec.learning_rate])
    return params, {"train_loss": losses}


def score_gradient_boost(params, X):
    F = np.full(X.shape[0], params["init"][0])
    lr = params["learning_rate"][0]
    for t in unpack_trees(params):
        F = F + lr * t.predict_value(X)[:, 0]
    return 1.0 / (1.0 + np.exp(-F))
