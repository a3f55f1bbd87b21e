"""Learner specification and the trained-model container."""
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConfigError, DimensionMismatch

FORMAT_VERSION = 1


class Algorithm(str, Enum):
    DECISION_TREE = "decision_tree"
    RANDOM_FOREST = "random_forest"
    EXTRA_TREES = "extra_trees"
    BAGGING = "bagging"
    ADABOOST = "adaboost"
    GRADIENT_BOOST = "gradient_boost"
    KNEIGHBORS = "kneighbors"
    GAUSSIAN_NB = "gaussian_nb"
    MULTINOMIAL_NB = "multinomial_nb"
    BERNOULLI_NB = "bernoulli_nb"
    NEAREST_CENTROID = "nearest_centroid"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"gradientboost": "gradient_boost", "randomforest": "random_forest",
                   "extratrees": "extra_trees", "decisiontree": "decision_tree",
                   "knn": "kneighbors", "gaussiannb": "gaussian_nb",
                   "multinomialnb": "multinomial_nb", "bernoullinb": "bernoulli_nb",
                   "nearestcentroid": "nearest_centroid"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown algorithm {value!r}") from None

    @property
    def is_tree_ensemble(self):
        return self in (Algorithm.RANDOM_FOREST, Algorithm.EXTRA_TREES, Algorithm.BAGGING)


@dataclass(frozen=True)
class LearnerSpec:
    """Hyper-parameters of one learner.

    ``base_max_depth`` overrides the per-algorithm base-estimator depth (1 for
    AdaBoost stumps, 3 for gradient boosting); ``max_features`` and
    ``bootstrap`` override the forest defaults (sqrt of the feature count,
    bootstrap on for RandomForest/Bagging).
    """
    algorithm: Algorithm = Algorithm.BAGGING
    n_estimators: int = 100
    k_neighbors: int = 5
    max_depth: int | None = None
    learning_rate: float = 0.1
    rng_seed: int = 0
    base_max_depth: int | None = None
    max_features: int | None = None
    bootstrap: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        if self.n_estimators < 1:
            raise ConfigError("n_estimators must be >= 1")
        if self.k_neighbors < 1 or self.k_neighbors % 2 == 0:
            raise ConfigError("k_neighbors must be a positive odd integer")
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("learning_rate must lie in (0, 1]")
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")

    def to_dict(self):
        d = asdict(self)
        d["algorithm"] = self.algorithm.value
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class TrainedModel:
    spec: LearnerSpec
    n_features: int
    params: dict = field(default_factory=dict)  # name -> ndarray
    info: dict = field(default_factory=dict)    # JSON-able fit diagnostics
    schema_digest: str | None = None
    schema: dict | None = None                  # full FeatureSchema, when known
    format_version: int = FORMAT_VERSION

    def __getitem__(self, key):
        return self.params[key]


def check_xy(X, y=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"feature matrix must be 2-D, got shape {X.shape}")
    if y is None:
        return X
    y = np.asarray(y).astype(np.int64).ravel()
    if y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows but {y.shape[0]} labels")
    return X, y
