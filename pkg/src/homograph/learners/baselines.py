"""Non-tree baselines: k-nearest neighbours, naive Bayes variants, nearest centroid."""
import numpy as np

# keep each (chunk x n_train x d) distance block around a few million floats
_KNN_BLOCK = 4_000_000


def fit_kneighbors(spec, X, y):
    return {"X": X.copy(), "y": y.astype(np.int64), "k": np.array([spec.k_neighbors])}, {}


def score_kneighbors(params, X):
    """Share of positives among the k nearest rows (ties: lower row index)."""
    Xt, yt, k = params["X"], params["y"], int(params["k"][0])
    k = min(k, Xt.shape[0])
    step = max(1, _KNN_BLOCK // max(1, Xt.size))
    out = np.empty(X.shape[0])
    for a in range(0, X.shape[0], step):
        diff = X[a:a + step, None, :] - Xt[None, :, :]
        dist = np.einsum("ijk,ijk->ij", diff, diff)
        nn = np.argsort(dist, axis=1, kind="stable")[:, :k]
        out[a:a + step] = yt[nn].mean(axis=1)
    return out


def _priors(y):
    counts = np.bincount(y, minlength=2).astype(np.float64)
    return np.log(counts / counts.sum())


def _posterior(jll):
    # P(class 1) from two joint log-likelihood columns; tanh form cannot overflow
    return 0.5 * (1.0 + np.tanh(0.5 * (jll[:, 1] - jll[:, 0])))


def fit_gaussian_nb(spec, X, y):
    means = np.stack([X[y == c].mean(axis=0) for c in (0, 1)])
    var = np.stack([X[y == c].var(axis=0) for c in (0, 1)])
    return {"log_prior": _priors(y), "mean": means,
            "var": np.maximum(var, 1e-9)}, {}


def score_gaussian_nb(params, X):
    mean, var = params["mean"], params["var"]
    jll = np.empty((X.shape[0], 2))
    for c in (0, 1):
        jll[:, c] = (params["log_prior"][c]
                     - 0.5 * np.sum(np.log(2.0 * np.pi * var[c]))
                     - 0.5 * np.sum((X - mean[c]) ** 2 / var[c], axis=1))
    return _posterior(jll)


def _nonnegative(X):
    # the SSIM column may be negative; counts-based models need x >= 0
    return np.maximum(X, 0.0)


def fit_multinomial_nb(spec, X, y, alpha=1.0):
    X = _nonnegative(X)
    counts = np.stack([X[y == c].sum(axis=0) for c in (0, 1)])
    logp = np.log(counts + alpha) - np.log(counts.sum(axis=1, keepdims=True)
                                           + alpha * X.shape[1])
    return {"log_prior": _priors(y), "feature_log_prob": logp}, {}


def score_multinomial_nb(params, X):
    jll = _nonnegative(X) @ params["feature_log_prob"].T + params["log_prior"]
    return _posterior(jll)


def fit_bernoulli_nb(spec, X, y, alpha=1.0):
    Xb = (X > 0.5).astype(np.float64)
    n_c = np.array([(y == c).sum() for c in (0, 1)], dtype=np.float64)
    counts = np.stack([Xb[y == c].sum(axis=0) for c in (0, 1)])
    p = (counts + alpha) / (n_c[:, None] + 2.0 * alpha)
    return {"log_prior": _priors(y), "log_p": np.log(p), "log_q": np.log1p(-p)}, {}


def score_bernoulli_nb(params, X):
    Xb = (X > 0.5).astype(np.float64)
    jll = Xb @ params["log_p"].T + (1.0 - Xb) @ params["log_q"].T + params["log_prior"]
    return _posterior(jll)


def fit_nearest_centroid(spec, X, y):
    return {"centroids": np.stack([X[y == c].mean(axis=0) for c in (0, 1)])}, {}


def score_nearest_centroid(params, X):
    """d0 / (d0 + d1): above 0.5 exactly when the class-1 centroid is nearer."""
    c = params["centroids"]
    d0 = np.sqrt(((X - c[0]) ** 2).sum(axis=1))
    d1 = np.sqrt(((X - c[1]) ** 2).sum(axis=1))
    total = d0 + d1
    return np.divide(d0, total, out=np.full_like(total, 0.5), where=total > 0)
