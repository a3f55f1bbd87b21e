"""From-scratch classifiers behind one fit / predict / save / load surface.

Labels are binary: 1 = homograph (positive), 0 = non-homograph.
"""
import json

import numpy as np

from ..errors import DegenerateLabels, DimensionMismatch, VersionError
from . import baselines, ensembles
from .base import FORMAT_VERSION, Algorithm, LearnerSpec, TrainedModel, check_xy
from .tree import check_tree, unpack_trees

A = Algorithm
_FIT = {
    A.DECISION_TREE: ensembles.fit_decision_tree,
    A.RANDOM_FOREST: ensembles.fit_averaging,
    A.EXTRA_TREES: ensembles.fit_averaging,
    A.BAGGING: ensembles.fit_averaging,
    A.ADABOOST: ensembles.fit_adaboost,
    A.GRADIENT_BOOST: ensembles.fit_gradient_boost,
    A.KNEIGHBORS: baselines.fit_kneighbors,
    A.GAUSSIAN_NB: baselines.fit_gaussian_nb,
    A.MULTINOMIAL_NB: baselines.fit_multinomial_nb,
    A.BERNOULLI_NB: baselines.fit_bernoulli_nb,
    A.NEAREST_CENTROID: baselines.fit_nearest_centroid,
}


def _score_tree(params, X):
    return unpack_trees(params)[0].predict_value(X)[:, 1]


_SCORE = {
    A.DECISION_TREE: _score_tree,
    A.RANDOM_FOREST: ensembles.score_votes,
    A.EXTRA_TREES: ensembles.score_votes,
    A.BAGGING: ensembles.score_votes,
    A.ADABOOST: ensembles.score_adaboost,
    A.GRADIENT_BOOST: ensembles.score_gradient_boost,
    A.KNEIGHBORS: baselines.score_kneighbors,
    A.GAUSSIAN_NB: baselines.score_gaussian_nb,
    A.MULTINOMIAL_NB: baselines.score_multinomial_nb,
    A.BERNOULLI_NB: baselines.score_bernoulli_nb,
    A.NEAREST_CENTROID: baselines.score_nearest_centroid,
}


def fit(spec, X, y, schema=None):
    """Train ``spec.algorithm`` on (X, y).

    ``schema`` (a FeatureSchema) is embedded in the model so later
    predictions can check their feature layout.
    """
    X, y = check_xy(X, y)
    if X.shape[0] < 2:
        raise DimensionMismatch("need at least two training rows")
    if not set(np.unique(y)) <= {0, 1}:
        raise DegenerateLabels("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise DegenerateLabels("training labels contain a single class")
    params, info = _FIT[spec.algorithm](spec, X, y)
    model = TrainedModel(spec, X.shape[1], params, info)
    if schema is not None:
        model.schema = schema.to_dict()
        model.schema_digest = schema.digest()
    return model


def predict_score(model, X):
    """Vote share, probability or normalized distance; > 0.5 means homograph."""
    X = check_xy(X)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got {X.shape[1]}")
    return _SCORE[model.spec.algorithm](model.params, X)


def predict(model, X):
    return (predict_score(model, X) > 0.5).astype(np.int64)


def validate_model(model):
    """Raise ValueError when a model breaks its structural invariants."""
    if "tree_offsets" in model.params:
        for t in unpack_trees(model.params):
            check_tree(t)
    if model.spec.algorithm is A.ADABOOST:
        w = model.params["estimator_weights"]
        if w.shape[0] != model.spec.n_estimators or not np.all(np.isfinite(w)):
            raise ValueError("AdaBoost weights must be finite, one per estimator")


def save_model(model, path):
    meta = {
        "format_version": model.format_version,
        "spec": model.spec.to_dict(),
        "n_features": model.n_features,
        "schema_digest": model.schema_digest,
        "schema": model.schema,
        "info": model.info,
        "param_names": sorted(model.params),
    }
    arrays = {f"p_{k}": v for k, v in model.params.items()}
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.array(json.dumps(meta, sort_keys=True)), **arrays)


def load_model(path):
    try:
        with np.load(path, allow_pickle=False) as z:
            meta = json.loads(str(z["__meta__"]))
            params = {k: z[f"p_{k}"] for k in meta["param_names"]}
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise VersionError(f"{path}: not a model file ({exc})") from None
    if meta.get("format_version") != FORMAT_VERSION:
        raise VersionError(f"{path}: unsupported model format {meta.get('format_version')!r}")
    return TrainedModel(LearnerSpec.from_dict(meta["spec"]), meta["n_features"], params,
                        meta["info"], meta["schema_digest"], meta["schema"],
                        meta["format_version"])


__all__ = ["Algorithm", "LearnerSpec", "TrainedModel", "fit", "load_model", "predict",
           "predict_score", "save_model", "validate_model"]
