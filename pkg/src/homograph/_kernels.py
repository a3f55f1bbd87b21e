"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and ``HOMOGRAPH_NUMBA`` is
not set to ``0``/``false``/``no``/``off``.  The split search performs the same
floating-point operations in the same order on both paths, so trees come out
identical; SSIM sums may round differently (numpy sums pairwise) and agree to
within 1e-12.

Split search works on a rank-encoded feature matrix: ``ranks[i, f]`` is the
position of ``X[i, f]`` among the sorted distinct values of column ``f``, and
``uniq[offsets[f]:offsets[f + 1]]`` holds those distinct values.  A node's
class (or residual) mass is histogrammed per rank, which makes split search
O(n_node + n_distinct) per feature and cheap on binary unigram columns.
"""
import os
from types import SimpleNamespace

import numpy as np

GINI = 0
MSE = 1

_flag = os.environ.get("HOMOGRAPH_NUMBA", "1").strip().lower()
_WANT_NUMBA = _flag not in ("0", "false", "no", "off")

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False


# --------------------------------------------------------------------------
# numpy implementations

def _global_ssim_np(x, y, r1, r2):
    mx = x.mean()
    my = y.mean()
    dx = x - mx
    dy = y - my
    vx = np.mean(dx * dx)
    vy = np.mean(dy * dy)
    cxy = np.mean(dx * dy)
    num = (2.0 * mx * my + r1) * (2.0 * cxy + r2)
    den = (mx * mx + my * my + r1) * (vx + vy + r2)
    return float(num / den)


def _proxy_np(a, b, criterion):
    if criterion == GINI:
        return (a * a + b * b) / (a + b)
    return (b * b) / a


def _best_split_np(ranks, uniq, offsets, rows, s0, s1, t0, t1, order, quota,
                   criterion, uniform, tol):
    parent = _proxy_np(t0, t1, criterion)
    s0r = s0[rows]
    s1r = s1[rows]
    best_f = -1
    best_thr = 0.0
    best_gain = 0.0
    visited = 0
    use_random = uniform.shape[0] > 0
    for j in range(order.shape[0]):
        if visited >= quota:
            break
        f = order[j]
        lo_off = offsets[f]
        u = offsets[f + 1] - lo_off
        r = ranks[rows, f]
        cnt = np.bincount(r, minlength=u)
        present = np.flatnonzero(cnt)
        if present.shape[0] < 2:
            continue
        visited += 1
        h0 = np.bincount(r, weights=s0r, minlength=u)[present]
        h1 = np.bincount(r, weights=s1r, minlength=u)[present]
        vals = uniq[lo_off + present]
        if use_random:
            lo = vals[0]
            hi = vals[-1]
            thr = lo + uniform[j] * (hi - lo)
            if thr >= hi:
                thr = lo
            m = vals <= thr
            l0 = 0.0
            l1 = 0.0
            for k in range(m.shape[0]):
                if m[k]:
                    l0 += h0[k]
                    l1 += h1[k]
            gain = (_proxy_np(l0, l1, criterion)
                    + _proxy_np(t0 - l0, t1 - l1, criterion) - parent)
            f_gain = gain
            f_thr = thr
        else:
            l0 = np.cumsum(h0)[:-1]
            l1 = np.cumsum(h1)[:-1]
            gains = (_proxy_np(l0, l1, criterion)
                     + _proxy_np(t0 - l0, t1 - l1, criterion) - parent)
            top = gains.max()
            k = int(np.flatnonzero(gains >= top - tol)[0])
            f_gain = gains[k]
            f_thr = (vals[k] + vals[k + 1]) / 2.0
            if f_thr == vals[k + 1]:
                f_thr = vals[k]
        if f_gain <= tol:
            continue
        if best_f < 0 or f_gain > best_gain + tol:
            best_f, best_thr, best_gain = f, f_thr, f_gain
        elif f_gain >= best_gain - tol and f < best_f:
            best_f, best_thr, best_gain = f, f_thr, f_gain
    return best_f, float(best_thr), float(best_gain)


def _apply_tree_np(X, feature, threshold, left, right):
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    active = left[node] >= 0
    while active.any():
        idx = rows[active]
        nd = node[idx]
        go_left = X[idx, feature[nd]] <= threshold[nd]
        node[idx] = np.where(go_left, left[nd], right[nd])
        active = left[node] >= 0
    return node


# --------------------------------------------------------------------------
# numba implementations

def _global_ssim_loop(x, y, r1, r2):
    n = x.shape[0]
    sx = 0.0
    sy = 0.0
    for i in range(n):
        sx += x[i]
        sy += y[i]
    mx = sx / n
    my = sy / n
    vx = 0.0
    vy = 0.0
    cxy = 0.0
    for i in range(n):
        dx = x[i] - mx
        dy = y[i] - my
        vx += dx * dx
        vy += dy * dy
        cxy += dx * dy
    vx /= n
    vy /= n
    cxy /= n
    num = (2.0 * mx * my + r1) * (2.0 * cxy + r2)
    den = (mx * mx + my * my + r1) * (vx + vy + r2)
    return num / den


def _proxy_loop(a, b, criterion):
    if criterion == 0:
        return (a * a + b * b) / (a + b)
    return (b * b) / a


def _best_split_loop(ranks, uniq, offsets, rows, s0, s1, t0, t1, order, quota,
                     criterion, uniform, tol):
    parent = _proxy_loop(t0, t1, criterion)
    max_u = 0
    for f in range(offsets.shape[0] - 1):
        if offsets[f + 1] - offsets[f] > max_u:
            max_u = offsets[f + 1] - offsets[f]
    cnt = np.zeros(max_u, dtype=np.int64)
    h0 = np.zeros(max_u)
    h1 = np.zeros(max_u)
    gains = np.zeros(max_u)
    best_f = -1
    best_thr = 0.0
    best_gain = 0.0
    visited = 0
    use_random = uniform.shape[0] > 0
    n = rows.shape[0]
    for j in range(order.shape[0]):
        if visited >= quota:
            break
        f = order[j]
        lo_off = offsets[f]
        u = offsets[f + 1] - lo_off
        for b in range(u):
            cnt[b] = 0
            h0[b] = 0.0
            h1[b] = 0.0
        for i in range(n):
            r = ranks[rows[i], f]
            cnt[r] += 1
            h0[r] += s0[rows[i]]
            h1[r] += s1[rows[i]]
        n_present = 0
        for b in range(u):
            if cnt[b] > 0:
                n_present += 1
        if n_present < 2:
            continue
        visited += 1
        if use_random:
            lo = 0.0
            hi = 0.0
            first = True
            for b in range(u):
                if cnt[b] > 0:
                    if first:
                        lo = uniq[lo_off + b]
                        first = False
                    hi = uniq[lo_off + b]
            thr = lo + uniform[j] * (hi - lo)
            if thr >= hi:
                thr = lo
            l0 = 0.0
            l1 = 0.0
            for b in range(u):
                if cnt[b] > 0 and uniq[lo_off + b] <= thr:
                    l0 += h0[b]
                    l1 += h1[b]
            f_gain = (_proxy_loop(l0, l1, criterion)
                      + _proxy_loop(t0 - l0, t1 - l1, criterion) - parent)
            f_thr = thr
        else:
            # gains[k] is the split after the k-th present bin
            l0 = 0.0
            l1 = 0.0
            k = 0
            seen = 0
            top = -np.inf
            for b in range(u):
                if cnt[b] == 0:
                    continue
                seen += 1
                if seen == n_present:
                    break
                l0 += h0[b]
                l1 += h1[b]
                g = (_proxy_loop(l0, l1, criterion)
                     + _proxy_loop(t0 - l0, t1 - l1, criterion) - parent)
                gains[k] = g
                if g > top:
                    top = g
                k += 1
            pick = 0
            for kk in range(k):
                if gains[kk] >= top - tol:
                    pick = kk
                    break
            f_gain = gains[pick]
            # thresholds sit between present bins pick and pick + 1
            seen = 0
            v_a = 0.0
            v_b = 0.0
            for b in range(u):
                if cnt[b] == 0:
                    continue
                if seen == pick:
                    v_a = uniq[lo_off + b]
                elif seen == pick + 1:
                    v_b = uniq[lo_off + b]
                    break
                seen += 1
            f_thr = (v_a + v_b) / 2.0
            if f_thr == v_b:
                f_thr = v_a
        if f_gain <= tol:
            continue
        if best_f < 0 or f_gain > best_gain + tol:
            best_f = f
            best_thr = f_thr
            best_gain = f_gain
        elif f_gain >= best_gain - tol and f < best_f:
            best_f = f
            best_thr = f_thr
            best_gain = f_gain
    return best_f, best_thr, best_gain


def _apply_tree_loop(X, feature, threshold, left, right):
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while left[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


numpy_impl = SimpleNamespace(
    name="numpy",
    global_ssim=_global_ssim_np,
    best_split=_best_split_np,
    apply_tree=_apply_tree_np,
)

if HAS_NUMBA:
    _proxy_jit = numba.njit(cache=True)(_proxy_loop)
    # rebind the helper the jitted split loop resolves at compile time
    _proxy_loop = _proxy_jit
    numba_impl = SimpleNamespace(
        name="numba",
        global_ssim=numba.njit(cache=True)(_global_ssim_loop),
        best_split=numba.njit(cache=True)(_best_split_loop),
        apply_tree=numba.njit(cache=True)(_apply_tree_loop),
    )
else:  # pragma: no cover
    numba_impl = None

active = numba_impl if (HAS_NUMBA and _WANT_NUMBA) else numpy_impl
BACKEND = active.name


def global_ssim(x, y, r1, r2):
    return float(active.global_ssim(x, y, r1, r2))


def best_split(ranks, uniq, offsets, rows, s0, s1, t0, t1, order, quota,
               criterion, uniform, tol):
    f, thr, gain = active.best_split(ranks, uniq, offsets, rows, s0, s1,
                                     float(t0), float(t1), order, int(quota),
                                     int(criterion), uniform, float(tol))
    return int(f), float(thr), float(gain)


def apply_tree(X, feature, threshold, left, right):
    return active.apply_tree(X, feature, threshold, left, right)
