"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The corpus-level criteria (6, 7 and 9) share one cross-validation run per
corpus seed through the ``corpus_runs`` fixture; its cost is charged to the
criteria that use it.
"""
import time
from contextlib import contextmanager

import numpy as np
import pytest

from homograph.datagen import Label, LabeledSample, generate_corpus, load_brands, \
    load_corpus, save_corpus
from homograph.datagen.idn import decode_domain
from homograph.evaluation import bin_equal_count, cross_validate, analyze, kfold_split, \
    labels_of
from homograph.features import FeatureMode, ssim_column
from homograph.learners import Algorithm, LearnerSpec, fit, load_model, predict_score, \
    save_model
from homograph.learners.tree import fit_classification_tree
from homograph.similarity import domain_ssim, ssim_image

import conftest
from oracles import brute_cart, naive_ssim
from test_evaluation import check_fold_laws, separable_corpus
from test_learners import noisy_fixture
from test_tree_oracle import flatten, flatten_oracle, make_fixture

CORPUS_SEEDS = (1, 2, 3)


@contextmanager
def criterion(number, title, budget, extra=0.0):
    """Time the block, record a summary line, then enforce the runtime budget."""
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - t0 + extra
        ok = ok and elapsed < budget
        conftest.ACCEPTANCE_LINES.append(
            f"criterion {number}: {'PASS' if ok else 'FAIL'} {title} "
            f"({elapsed:.1f}s, budget {budget:.0f}s)")
    assert elapsed < budget, f"criterion {number} took {elapsed:.1f}s"


@pytest.fixture(scope="session")
def corpus_runs(pruned_table, renderer):
    """Analysis of the default generated corpus for every seed, plus elapsed time."""
    t0 = time.perf_counter()
    spec = LearnerSpec("bagging", n_estimators=100)
    runs = {}
    for seed in CORPUS_SEEDS:
        corpus = generate_corpus(load_brands(), pruned_table, seed=seed)
        ssim = ssim_column(corpus, renderer)
        report = analyze(corpus, spec, k=5, seed=seed, renderer=renderer, ssim_values=ssim)
        runs[seed] = (corpus, ssim, report)
    return runs, time.perf_counter() - t0


def test_criterion_1_ssim_oracle(renderer):
    with criterion(1, "SSIM matches the exact-arithmetic oracle", 5):
        rng = np.random.default_rng(2024)
        for i in range(100):
            s = int(rng.integers(4, 17))
            x = rng.integers(0, 256, (s, s)).astype(np.uint8)
            if i % 2:
                y = np.clip(x.astype(int) + rng.integers(-30, 31, (s, s)), 0, 255)
                y = y.astype(np.uint8)
            else:
                y = rng.integers(0, 256, (s, s)).astype(np.uint8)
            assert abs(ssim_image(x, y) - naive_ssim(x.ravel(), y.ravel())) <= 1e-12
        for a in (0, 1, 128, 255):
            for b in (0, 77, 255):
                x = np.full((6, 6), a, np.uint8)
                y = np.full((6, 6), b, np.uint8)
                assert abs(ssim_image(x, y) - naive_ssim(x.ravel(), y.ravel())) <= 1e-12
        text = "abcdefghijklmnopqrstuvwxyz0123456789-.аеорсхΑΒΕΖΗıîõ"
        assert len(text) >= 50
        for ch in text[:50]:
            g = renderer.render(ord(ch))
            assert ssim_image(g, g) == 1.0


def test_criterion_2_domain_rules():
    with criterion(2, "domain similarity rules and punycode decoding", 1):
        assert domain_ssim("short.com", "alongdomain.com").mean_ssim == 0.0
        values = iter([0.5, 1.0, 0.25, 1.0])
        sim = domain_ssim("abcd", "wxyz", pair_ssim=lambda a, b: next(values))
        assert sim.mean_ssim == 0.6875 and sim.diff_positions == (0, 2)
        decoded = decode_domain("xn--ggle-0qaa.com")
        assert decoded == "gõõgle.com"
        sim = domain_ssim(decoded, "google.com")
        assert sim.diff_positions == (1, 2) and 0 < sim.mean_ssim < 1
        assert sim == domain_ssim("gõõgle.com", "google.com")


def test_criterion_3_cart_oracle():
    with criterion(3, "decision tree equals brute-force CART", 30):
        fixtures = [make_fixture(seed) for seed in range(24)]
        assert all(X.shape[0] <= 30 and X.shape[1] <= 4 for X, _ in fixtures)
        for X, y in fixtures:
            for depth in (None, 2):
                tree = fit_classification_tree(X, y, max_depth=depth)
                assert flatten(tree) == flatten_oracle(brute_cart(X.tolist(), y.tolist(),
                                                                  depth))


def test_criterion_4_ensemble_laws():
    with criterion(4, "AdaBoost, gradient boosting and forest laws", 60):
        for seed in (0, 1, 2):
            X, y = noisy_fixture(seed, n=200)
            ada = fit(LearnerSpec("adaboost", n_estimators=60), X, y).info
            accepted = ada["stage_errors"][:len(ada["weight_sums"])]
            assert accepted and all(e < 0.5 for e in accepted)
            assert all(abs(s - 1.0) <= 1e-9 for s in ada["weight_sums"])
            gb = fit(LearnerSpec("gradient_boost", n_estimators=100, learning_rate=0.1),
                     X, y)
            loss = gb.info["train_loss"]
            assert len(loss) == 101
            assert all(b <= a for a, b in zip(loss, loss[1:]))
        X, y = noisy_fixture(5)
        tree = fit(LearnerSpec("decision_tree"), X, y)
        forest = fit(LearnerSpec("random_forest", n_estimators=1, bootstrap=False,
                                 max_features=X.shape[1]), X, y)
        for key in ("feature", "threshold", "left", "right", "value"):
            assert np.array_equal(tree.params[key], forest.params[key])


def test_criterion_5_folds_and_leakage():
    with criterion(5, "fold laws and vocabulary leakage guard", 5):
        for n in (7, 10, 101, 3143):
            labels = (np.arange(n) % 3 == 0).astype(int)
            k = 3 if n < 10 else 5
            check_fold_laws(kfold_split(n, k, 11, labels), n, k, labels)
            check_fold_laws(kfold_split(n, k, 11), n, k)
        corpus = separable_corpus()
        corpus.append(LabeledSample("abж.q", "brand.q", Label.HOMOGRAPH))
        res = cross_validate(corpus, "unigram", LearnerSpec("decision_tree"), k=5, seed=3)
        idx = len(corpus) - 1
        for (_, test), schema in zip(res.folds, res.fold_schemas):
            assert ("ж" in schema.vocabulary.chars) == (idx not in test)


def test_criterion_6_directional_ordering(corpus_runs):
    runs, shared = corpus_runs
    with criterion(6, "combined beats SSIM-only on three corpus seeds", 600, shared):
        for seed, (corpus, _, report) in runs.items():
            y = labels_of(corpus)
            assert len({s.brand for s in corpus}) >= 50
            assert int(y.sum()) >= 1000 and int((y == 0).sum()) >= 2000
            m = {mode: r.metrics for mode, r in report.cv.items()}
            s, u, c = m[FeatureMode.SSIM_ONLY], m[FeatureMode.UNIGRAM_ONLY], \
                m[FeatureMode.COMBINED]
            print(f"seed {seed}: ssim {s.acc:.4f}/{s.fpr:.4f} unigram {u.acc:.4f}/"
                  f"{u.fpr:.4f} combined {c.acc:.4f}/{c.fpr:.4f}")
            assert c.acc > s.acc and c.fpr <= s.fpr
            assert min(s.acc, u.acc, c.acc) >= 0.85


def test_criterion_7_binned_error_analysis(corpus_runs):
    runs, shared = corpus_runs
    with criterion(7, "equal-count bins with combined on top", 600, shared):
        for corpus, _, report in runs.values():
            bins = report.equal_count.bins
            assert len(bins) == 10
            assert sum(b.sample_count for b in bins) == len(corpus)
            idx = np.concatenate([b.indices for b in bins])
            assert sorted(idx.tolist()) == list(range(len(corpus)))
            for b in bins:
                acc = b.accuracy
                assert acc["combined"] >= max(acc["ssim"], acc["unigram"]) - 0.02
        corpus, ssim, _ = runs[CORPUS_SEEDS[0]]
        assert len(corpus) >= 3143
        y = labels_of(corpus[:3143])
        rep = bin_equal_count(ssim[:3143], y, {"labels": y},
                              [s.candidate for s in corpus[:3143]])
        assert [b.sample_count for b in rep.bins] == [314] * 9 + [317]


def test_criterion_8_round_trips(tmp_path, small_corpus):
    with criterion(8, "corpus and model round-trips", 10):
        path = tmp_path / "corpus.jsonl"
        save_corpus(small_corpus, path, meta={"note": "round trip"})
        assert load_corpus(path) == small_corpus
        X, y = noisy_fixture(8)
        probe = noisy_fixture(9)[0]
        for algo in Algorithm:
            model = fit(LearnerSpec(algo, n_estimators=15), X, y)
            mpath = tmp_path / f"{algo.value}.npz"
            save_model(model, mpath)
            back = load_model(mpath)
            assert np.array_equal(predict_score(back, probe), predict_score(model, probe))


def test_criterion_9_null_model(corpus_runs, renderer):
    runs, _ = corpus_runs
    corpus, ssim, _ = runs[CORPUS_SEEDS[0]]
    with criterion(9, "label-shuffled corpus scores near chance", 300):
        # fair-coin labels carry no information about the domains
        coin = np.random.default_rng(99).integers(0, 2, len(corpus))
        shuffled = [LabeledSample(s.candidate, s.brand, Label(int(c)))
                    for s, c in zip(corpus, coin)]
        res = cross_validate(shuffled, "combined", LearnerSpec("bagging", n_estimators=100),
                             k=5, seed=0, renderer=renderer, ssim_values=ssim)
        print(f"null-model accuracy {res.metrics.acc:.4f}")
        assert 0.4 <= res.metrics.acc <= 0.6
