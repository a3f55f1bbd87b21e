"""Binary decision trees grown greedily on weighted node statistics.

A node carries two per-sample statistic channels ``s0``/``s1``.  For
classification these are the sample weights of class 0 and class 1 and
splits minimize weighted Gini impurity; for regression they are the weight
and the weighted target, and splits minimize squared error.  Row
multiplicities (bootstrap counts) and boosting weights are both expressed
through these channels.

All randomness (feature order, random thresholds) is drawn here, in Python,
so the numba and numpy kernels build identical trees.
"""
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from .._kernels import GINI, MSE


@dataclass
class RankedMatrix:
    X: np.ndarray        # (n, d) float64
    ranks: np.ndarray    # (n, d) int32, rank of X[i, f] among column f's distinct values
    uniq: np.ndarray     # concatenated sorted distinct values
    offsets: np.ndarray  # (d + 1,) int64

    @classmethod
    def encode(cls, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        n, d = X.shape
        ranks = np.empty((n, d), dtype=np.int32)
        uniq, offsets = [], [0]
        for f in range(d):
            u, inv = np.unique(X[:, f], return_inverse=True)
            ranks[:, f] = inv.ravel()
            uniq.append(u)
            offsets.append(offsets[-1] + len(u))
        return cls(X, ranks, np.concatenate(uniq) if uniq else np.zeros(0),
                   np.asarray(offsets, dtype=np.int64))

    @property
    def n_features(self):
        return self.X.shape[1]


@dataclass
class Tree:
    feature: np.ndarray    # int64, -1 at leaves
    threshold: np.ndarray  # float64; go left when x <= threshold
    left: np.ndarray       # int64 child index, -1 at leaves
    right: np.ndarray
    value: np.ndarray      # (n_nodes, 2) class distribution or (n_nodes, 1) mean

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    @property
    def depth(self):
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.left[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _kernels.apply_tree(X, self.feature, self.threshold, self.left, self.right)

    def predict_value(self, X):
        return self.value[self.apply(X)]

    def predict_class(self, X):
        v = self.predict_value(X)
        return (v[:, 1] > v[:, 0]).astype(np.int64)


def _parent_proxy(t0, t1, criterion):
    if criterion == GINI:
        return (t0 * t0 + t1 * t1) / (t0 + t1)
    return t1 * t1 / t0


def build_tree(data, rows, s0, s1, criterion=GINI, max_depth=None,
               max_features=None, splitter="best", rng=None):
    """Grow one tree on ``rows`` of a ``RankedMatrix``.

    ``max_features`` is the number of non-constant features examined per node
    (all when None); features are visited in a fresh random order per node
    whenever that number is below the feature count.  ``splitter="random"``
    draws one uniform threshold per examined feature.
    """
    d = data.n_features
    quota = d if max_features is None else min(int(max_features), d)
    random_order = quota < d
    if (random_order or splitter == "random") and rng is None:
        raise ValueError("a random generator is required for feature sampling")
    natural = np.arange(d, dtype=np.int64)
    no_uniform = np.zeros(0)
    s0 = np.ascontiguousarray(s0, dtype=np.float64)
    s1 = np.ascontiguousarray(s1, dtype=np.float64)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(t0, t1):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        if criterion == GINI:
            value.append((t0 / (t0 + t1), t1 / (t0 + t1)))
        else:
            value.append((t1 / t0,))
        return len(feature) - 1

    rows = np.asarray(rows, dtype=np.int64)
    t0, t1 = float(s0[rows].sum()), float(s1[rows].sum())
    stack = [(new_node(t0, t1), rows, 0, t0, t1)]
    while stack:
        nid, rows, depth, t0, t1 = stack.pop()
        if rows.shape[0] < 2 or (max_depth is not None and depth >= max_depth):
            continue
        if criterion == GINI and (t0 <= 0.0 or t1 <= 0.0):
            continue
        parent = _parent_proxy(t0, t1, criterion)
        total = t0 + t1 if criterion == GINI else t0
        tol = 1e-12 * (abs(parent) + total)
        order = rng.permutation(d).astype(np.int64) if random_order else natural
        uniform = rng.random(d) if splitter == "random" else no_uniform
        f, thr, _ = _kernels.best_split(data.ranks, data.uniq, data.offsets, rows,
                                        s0, s1, t0, t1, order, quota, criterion,
                                        uniform, tol)
        if f < 0:
            continue
        go_left = data.X[rows, f] <= thr
        lrows, rrows = rows[go_left], rows[~go_left]
        l0, l1 = float(s0[lrows].sum()), float(s1[lrows].sum())
        r0, r1 = float(s0[rrows].sum()), float(s1[rrows].sum())
        lid = new_node(l0, l1)
        rid = new_node(r0, r1)
        feature[nid], threshold[nid] = f, thr
        left[nid], right[nid] = lid, rid
        stack.append((rid, rrows, depth + 1, r0, r1))
        stack.append((lid, lrows, depth + 1, l0, l1))

    return Tree(np.asarray(feature, dtype=np.int64),
                np.asarray(threshold, dtype=np.float64),
                np.asarray(left, dtype=np.int64),
                np.asarray(right, dtype=np.int64),
                np.asarray(value, dtype=np.float64))


def fit_classification_tree(X, y, weights=None, max_depth=None, max_features=None,
                            splitter="best", rng=None, data=None):
    """Gini tree on (X, y); rows with zero weight are left out entirely."""
    data = data if data is not None else RankedMatrix.encode(X)
    y = np.asarray(y)
    w = np.ones(len(y)) if weights is None else np.asarray(weights, dtype=np.float64)
    rows = np.flatnonzero(w > 0)
    return build_tree(data, rows, w * (y == 0), w * (y == 1), GINI,
                      max_depth, max_features, splitter, rng)


def fit_regression_tree(X, target, max_depth=3, data=None):
    data = data if data is not None else RankedMatrix.encode(X)
    n = len(target)
    return build_tree(data, np.arange(n), np.ones(n), np.asarray(target, dtype=np.float64),
                      MSE, max_depth)


def pack_trees(trees):
    """Concatenate trees into flat arrays (child indices stay tree-local)."""
    sizes = [t.n_nodes for t in trees]
    width = trees[0].value.shape[1] if trees else 2
    return {
        "tree_offsets": np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64),
        "feature": np.concatenate([t.feature for t in trees]) if trees else np.zeros(0, np.int64),
        "threshold": np.concatenate([t.threshold for t in trees]) if trees else np.zeros(0),
        "left": np.concatenate([t.left for t in trees]) if trees else np.zeros(0, np.int64),
        "right": np.concatenate([t.right for t in trees]) if trees else np.zeros(0, np.int64),
        "value": np.concatenate([t.value for t in trees]) if trees else np.zeros((0, width)),
    }


def unpack_trees(params):
    off = params["tree_offsets"]
    return [Tree(params["feature"][a:b], params["threshold"][a:b], params["left"][a:b],
                 params["right"][a:b], params["value"][a:b])
            for a, b in zip(off[:-1], off[1:])]


def check_tree(tree):
    """Raise ValueError unless ``tree`` is a well-formed rooted binary tree."""
    n = tree.n_nodes
    if n == 0:
        raise ValueError("empty tree")
    parents = np.zeros(n, dtype=np.int64)
    for i in range(n):
        l, r = tree.left[i], tree.right[i]
        if (l < 0) != (r < 0):
            raise ValueError(f"node {i} has exactly one child")
        if l >= 0:
            if not (0 < l < n and 0 < r < n):
                raise ValueError(f"node {i} has out-of-range children")
            if tree.feature[i] < 0:
                raise ValueError(f"internal node {i} lacks a feature")
            parents[l] += 1
            parents[r] += 1
        elif tree.value.shape[1] == 2 and abs(tree.value[i].sum() - 1.0) > 1e-9:
            raise ValueError(f"leaf {i} distribution does not sum to 1")
    if parents[0] != 0 or np.any(parents[1:] != 1):
        raise ValueError("node graph is not a tree")
    seen, todo = 0, [0]
    while todo:
        i = todo.pop()
        seen += 1
        if tree.left[i] >= 0:
            todo += [tree.left[i], tree.right[i]]
        if seen > n:
            raise ValueError("cycle in node graph")
    if seen != n:
        raise ValueError("unreachable nodes")
