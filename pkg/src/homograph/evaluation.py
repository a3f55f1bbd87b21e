"""Cross-validation, confusion metrics and SSIM-binned error analysis."""
import json
from dataclasses import dataclass, field

import numpy as np

from . import learners
from .errors import EmptyInput, InvalidK, LengthMismatch
from .features import FeatureMode, featurize_matrix, make_schema, ssim_column
from .similarity import char_diff_ratio, domain_ssim


@dataclass(frozen=True)
class Metrics:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn

    @property
    def acc(self):
        return (self.tp + self.tn) / self.total if self.total else None

    @property
    def fpr(self):
        d = self.fp + self.tn
        return self.fp / d if d else None

    @property
    def tpr(self):
        d = self.tp + self.fn
        return self.tp / d if d else None

    def __add__(self, other):
        return Metrics(self.tp + other.tp, self.tn + other.tn,
                       self.fp + other.fp, self.fn + other.fn)

    def to_dict(self):
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn,
                "acc": self.acc, "fpr": self.fpr, "tpr": self.tpr}


def compute_metrics(y_true, y_pred):
    t = np.asarray(y_true).astype(np.int64).ravel()
    p = np.asarray(y_pred).astype(np.int64).ravel()
    if t.shape != p.shape:
        raise LengthMismatch(f"{t.shape[0]} labels vs {p.shape[0]} predictions")
    if t.shape[0] == 0:
        raise EmptyInput("no predictions to score")
    return Metrics(int(np.sum((t == 1) & (p == 1))), int(np.sum((t == 0) & (p == 0))),
                   int(np.sum((t == 0) & (p == 1))), int(np.sum((t == 1) & (p == 0))))


def kfold_split(n, k, rng_seed=0, labels=None):
    """Shuffled k-fold partition of range(n), stratified when labels are given.

    Indices of each class are shuffled and laid end to end, then dealt to the
    folds round-robin, so fold sizes and per-class counts differ by at most 1.
    """
    if not 2 <= k <= n:
        raise InvalidK(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(rng_seed)
    if labels is None:
        order = rng.permutation(n)
    else:
        labels = np.asarray(labels)
        if labels.shape[0] != n:
            raise LengthMismatch(f"{labels.shape[0]} labels for n={n}")
        order = np.concatenate([rng.permutation(np.flatnonzero(labels == c))
                                for c in np.unique(labels)])
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % k
    all_idx = np.arange(n)
    return [(all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k)]


def labels_of(samples):
    return np.array([int(s.label) for s in samples], dtype=np.int64)


@dataclass
class CVResult:
    mode: FeatureMode
    spec: learners.LearnerSpec
    metrics: Metrics
    fold_metrics: list
    oof_pred: np.ndarray
    oof_score: np.ndarray
    folds: list
    fold_schemas: list = field(default_factory=list)

    def to_dict(self):
        return {"mode": self.mode.value, "algorithm": self.spec.algorithm.value,
                "metrics": self.metrics.to_dict(),
                "fold_metrics": [m.to_dict() for m in self.fold_metrics]}


def cross_validate(corpus, mode, spec, k=5, seed=0, renderer=None, params=None,
                   ssim_values=None, folds=None):
    """k-fold CV with the unigram vocabulary rebuilt on each training split.

    Every sample receives exactly one out-of-fold prediction.  ``ssim_values``
    and ``folds`` may be shared across calls so several approaches see the
    same partitions and the corpus is rendered once.
    """
    corpus = list(corpus)
    mode = FeatureMode.parse(mode)
    y = labels_of(corpus)
    if folds is None:
        folds = kfold_split(len(corpus), k, seed, labels=y)
    if mode.uses_ssim and ssim_values is None:
        ssim_values = ssim_column(corpus, renderer, params)
    oof_pred = np.full(len(corpus), -1, dtype=np.int64)
    oof_score = np.full(len(corpus), np.nan)
    fold_metrics, schemas = [], []
    for train, test in folds:
        train_s = [corpus[i] for i in train]
        test_s = [corpus[i] for i in test]
        schema = make_schema(mode, train_s, renderer, params)
        sv_train = ssim_values[train] if mode.uses_ssim else None
        sv_test = ssim_values[test] if mode.uses_ssim else None
        X_train = featurize_matrix(train_s, schema, renderer, sv_train)
        X_test = featurize_matrix(test_s, schema, renderer, sv_test)
        model = learners.fit(spec, X_train, y[train], schema)
        score = learners.predict_score(model, X_test)
        pred = (score > 0.5).astype(np.int64)
        oof_pred[test] = pred
        oof_score[test] = score
        fold_metrics.append(compute_metrics(y[test], pred))
        schemas.append(schema)
    total = fold_metrics[0]
    for m in fold_metrics[1:]:
        total = total + m
    return CVResult(mode, spec, total, fold_metrics, oof_pred, oof_score, folds, schemas)


APPROACHES = (FeatureMode.SSIM_ONLY, FeatureMode.UNIGRAM_ONLY, FeatureMode.COMBINED)


def compare_approaches(corpus, specs, k=5, seed=0, renderer=None, params=None,
                       modes=APPROACHES, ssim_values=None):
    """Cross-validate each feature mode on the same folds.

    ``specs`` is one LearnerSpec for every mode or a ``{mode: spec}`` map.
    """
    corpus = list(corpus)
    y = labels_of(corpus)
    folds = kfold_split(len(corpus), k, seed, labels=y)
    if ssim_values is None:
        ssim_values = ssim_column(corpus, renderer, params)
    out = {}
    for mode in modes:
        mode = FeatureMode.parse(mode)
        spec = specs.get(mode, specs.get(mode.value)) if isinstance(specs, dict) else specs
        out[mode] = cross_validate(corpus, mode, spec, k, seed, renderer, params,
                                   ssim_values, folds)
    return out


# ---------------------------------------------------------------- binning

@dataclass
class Bin:
    lower: float | None
    upper: float | None
    lower_closed: bool
    sample_count: int
    correct: dict
    accuracy: dict
    indices: np.ndarray

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "lower_closed": self.lower_closed,
                "sample_count": self.sample_count, "correct": self.correct,
                "accuracy": self.accuracy}


@dataclass
class BinReport:
    scheme: str  # "equal_range" | "equal_count"
    approaches: list
    bins: list

    def to_dict(self):
        return {"scheme": self.scheme, "approaches": self.approaches,
                "bins": [b.to_dict() for b in self.bins]}


def _check_bin_inputs(ssim, y_true, preds):
    ssim = np.asarray(ssim, dtype=np.float64)
    y_true = np.asarray(y_true).astype(np.int64)
    if ssim.shape[0] == 0:
        raise EmptyInput("no samples to bin")
    if y_true.shape != ssim.shape:
        raise LengthMismatch("ssim and labels differ in length")
    preds = {str(getattr(k, "value", k)): np.asarray(v) for k, v in preds.items()}
    for name, p in preds.items():
        if p.shape != ssim.shape:
            raise LengthMismatch(f"predictions for {name} differ in length")
    return ssim, y_true, preds


def _make_bin(idx, ssim, y_true, preds, lower, upper, lower_closed):
    correct = {k: int(np.sum(p[idx] == y_true[idx])) for k, p in preds.items()}
    n = int(idx.shape[0])
    acc = {k: (c / n if n else None) for k, c in correct.items()}
    return Bin(lower, upper, lower_closed, n, correct, acc, idx)


def bin_equal_range(ssim, y_true, preds, n_bins=10):
    """Equal-width SSIM bins over [min, max]: [e0, e1], (e1, e2], ..., (e9, max]."""
    ssim, y_true, preds = _check_bin_inputs(ssim, y_true, preds)
    lo, hi = float(ssim.min()), float(ssim.max())
    if hi == lo:
        edges = np.full(n_bins + 1, lo)
        which = np.zeros(ssim.shape[0], dtype=np.int64)
    else:
        edges = lo + (hi - lo) * np.arange(n_bins + 1) / n_bins
        edges[0], edges[-1] = lo, hi
        which = np.searchsorted(edges[1:-1], ssim, side="left")
    bins = []
    for b in range(n_bins):
        idx = np.flatnonzero(which == b)
        bins.append(_make_bin(idx, ssim, y_true, preds, float(edges[b]),
                              float(edges[b + 1]), b == 0))
    return BinReport("equal_range", list(preds), bins)


def equal_count_order(ssim, candidates=None):
    """Sample indices sorted by SSIM, ties broken by candidate string."""
    ssim = np.asarray(ssim, dtype=np.float64)
    if candidates is None:
        return np.argsort(ssim, kind="stable")
    return np.array(sorted(range(ssim.shape[0]), key=lambda i: (ssim[i], candidates[i])),
                    dtype=np.int64)


def bin_equal_count(ssim, y_true, preds, candidates=None, n_bins=10):
    """Bins of floor(N / n_bins) ascending-SSIM samples; the last takes the rest."""
    ssim, y_true, preds = _check_bin_inputs(ssim, y_true, preds)
    order = equal_count_order(ssim, candidates)
    size = ssim.shape[0] // n_bins
    bins = []
    for b in range(n_bins):
        idx = order[b * size:(b + 1) * size] if b < n_bins - 1 else order[b * size:]
        lower = float(ssim[idx].min()) if idx.size else None
        upper = float(ssim[idx].max()) if idx.size else None
        bins.append(_make_bin(np.sort(idx), ssim, y_true, preds, lower, upper, True))
    return BinReport("equal_count", list(preds), bins)


# ---------------------------------------------------------- error samples

GROUP_BINS = {"LRG": range(0, 6), "MRG": range(6, 7), "HRG": range(7, 10)}


def range_groups(count_report):
    """Sample indices of the low / middle / high SSIM groups of a 10-bin report."""
    return {g: np.sort(np.concatenate([count_report.bins[b].indices for b in bins]))
            for g, bins in GROUP_BINS.items()}


@dataclass
class ErrorSampleReport:
    group: str
    reference: str   # approach that got these samples right
    failing: str     # approach that got them wrong
    total: int
    homographs: int
    non_homographs: int
    error_samples: list
    diff_ratios: list

    @property
    def error_homographs(self):
        return sum(1 for e in self.error_samples if e["label"] == 1)

    @property
    def error_non_homographs(self):
        return len(self.error_samples) - self.error_homographs

    @property
    def fixed_by_combined(self):
        return sum(1 for e in self.error_samples if e["combined_correct"])

    def to_dict(self):
        return {"group": self.group, "reference": self.reference, "failing": self.failing,
                "total": self.total, "homographs": self.homographs,
                "non_homographs": self.non_homographs,
                "error_samples": self.error_samples,
                "error_homographs": self.error_homographs,
                "error_non_homographs": self.error_non_homographs,
                "fixed_by_combined": self.fixed_by_combined,
                "diff_ratios": self.diff_ratios}


def extract_error_samples(samples, y_true, preds_a, preds_b, preds_combined,
                          group="LRG", reference="unigram", failing="ssim",
                          renderer=None, params=None, ssim_values=None):
    """Samples predicted correctly by approach A but wrongly by approach B.

    For each error homograph of equal length to its brand the share of
    positions whose glyph SSIM is below 1 is reported in ``diff_ratios``.
    """
    samples = list(samples)
    y = np.asarray(y_true).astype(np.int64)
    a, b, c = (np.asarray(p).astype(np.int64) for p in (preds_a, preds_b, preds_combined))
    if not (len(samples) == y.shape[0] == a.shape[0] == b.shape[0] == c.shape[0]):
        raise LengthMismatch("samples, labels and predictions must align")
    errs = np.flatnonzero((a == y) & (b != y))
    rows, ratios = [], []
    for i in errs:
        s = samples[i]
        row = {"candidate": s.candidate, "brand": s.brand, "label": int(y[i]),
               "pred_" + reference: int(a[i]), "pred_" + failing: int(b[i]),
               "pred_combined": int(c[i]), "combined_correct": bool(c[i] == y[i])}
        if ssim_values is not None:
            row["ssim"] = float(ssim_values[i])
        rows.append(row)
        if y[i] == 1 and len(s.candidate) == len(s.brand):
            sim = domain_ssim(s.candidate, s.brand, renderer, params)
            ratios.append(char_diff_ratio(sim))
    n_h = int(np.sum(y == 1))
    return ErrorSampleReport(group, reference, failing, len(samples), n_h,
                             len(samples) - n_h, rows, ratios)


@dataclass
class AnalysisReport:
    cv: dict
    equal_range: BinReport
    equal_count: BinReport
    groups: dict

    def to_dict(self):
        return {"cv": {m.value: r.to_dict() for m, r in self.cv.items()},
                "equal_range": self.equal_range.to_dict(),
                "equal_count": self.equal_count.to_dict(),
                "groups": {g: r.to_dict() for g, r in self.groups.items()}}


def analyze(corpus, specs, k=5, seed=0, renderer=None, params=None, ssim_values=None):
    """Cross-validate all three approaches, bin by SSIM and pull error samples."""
    corpus = list(corpus)
    if ssim_values is None:
        ssim_values = ssim_column(corpus, renderer, params)
    cv = compare_approaches(corpus, specs, k, seed, renderer, params, ssim_values=ssim_values)
    y = labels_of(corpus)
    preds = {m.value: cv[m].oof_pred for m in APPROACHES}
    cands = [s.candidate for s in corpus]
    er = bin_equal_range(ssim_values, y, preds)
    ec = bin_equal_count(ssim_values, y, preds, cands)
    groups = {}
    roles = {"LRG": ("unigram", "ssim"), "HRG": ("ssim", "unigram")}
    for g, idx in range_groups(ec).items():
        if g not in roles:
            continue
        ref, fail = roles[g]
        groups[g] = extract_error_samples(
            [corpus[i] for i in idx], y[idx], preds[ref][idx], preds[fail][idx],
            preds["combined"][idx], g, ref, fail, renderer, params, ssim_values[idx])
    return AnalysisReport(cv, er, ec, groups)


# ------------------------------------------------------------- rendering

def _pct(x):
    return "   n/a" if x is None else f"{100 * x:6.2f}"


def format_metrics_table(results):
    """Aligned text table, one row per (approach, algorithm)."""
    lines = [f"{'approach':<10} {'algorithm':<16} {'ACC%':>7} {'FPR%':>7} {'TPR%':>7}"
             f" {'tp':>6} {'tn':>6} {'fp':>6} {'fn':>6}"]
    for r in results:
        m = r.metrics
        lines.append(f"{r.mode.value:<10} {r.spec.algorithm.value:<16} {_pct(m.acc):>7}"
                     f" {_pct(m.fpr):>7} {_pct(m.tpr):>7} {m.tp:>6} {m.tn:>6}"
                     f" {m.fp:>6} {m.fn:>6}")
    return "\n".join(lines)


def format_bin_table(report):
    head = f"{'No':>3} {'bin':<18} {'#samples':>8}"
    for a in report.approaches:
        head += f"  {a + ' correct (%)':>24}"
    lines = [f"[{report.scheme}]", head]
    for i, b in enumerate(report.bins, 1):
        if b.lower is None:
            span = "(empty)"
        else:
            left = "[" if b.lower_closed else "("
            span = f"{left}{b.lower:.3f}, {b.upper:.3f}]"
        row = f"{i:>3} {span:<18} {b.sample_count:>8}"
        for a in report.approaches:
            acc = b.accuracy[a]
            cell = f"{b.correct[a]} ({'n/a' if acc is None else f'{100 * acc:.2f}%'})"
            row += f"  {cell:>24}"
        lines.append(row)
    return "\n".join(lines)


def format_group_table(groups):
    names = list(groups)
    rows = [("Total samples", "total"), ("Homographs", "homographs"),
            ("Non-homographs", "non_homographs"), ("Total error samples", None),
            ("Error homographs", "error_homographs"),
            ("Error non-homographs", "error_non_homographs"),
            ("Fixed by combined", "fixed_by_combined")]
    lines = [f"{'':<22}" + "".join(f"{n:>10}" for n in names)]
    for label, attr in rows:
        cells = []
        for n in names:
            g = groups[n]
            cells.append(len(g.error_samples) if attr is None else getattr(g, attr))
        lines.append(f"{label:<22}" + "".join(f"{c:>10}" for c in cells))
    return "\n".join(lines)


def figure_csv(report):
    """bin_index,approach,accuracy rows for plotting per-bin accuracy."""
    lines = ["bin_index,approach,accuracy"]
    for i, b in enumerate(report.bins, 1):
        for a in report.approaches:
            acc = b.accuracy[a]
            lines.append(f"{i},{a},{'' if acc is None else repr(acc)}")
    return "\n".join(lines) + "\n"


def to_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=_default)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
