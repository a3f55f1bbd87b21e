"""Unigram vocabulary, feature schemas and feature matrices.

Three feature layouts are supported: the mean per-character SSIM alone, the
unigram presence bits alone, and both with the SSIM value in column 0.
"""
import csv
import hashlib
import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EmptyCorpus, SchemaMismatch
from .glyphs import get_renderer
from .similarity import SsimParams, domain_ssim


class FeatureMode(str, Enum):
    SSIM_ONLY = "ssim"
    UNIGRAM_ONLY = "unigram"
    COMBINED = "combined"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower()
        for m in cls:
            if v in (m.value, m.name.lower()):
                return m
        raise ValueError(f"unknown feature mode {value!r}")

    @property
    def uses_ssim(self):
        return self is not FeatureMode.UNIGRAM_ONLY

    @property
    def uses_unigrams(self):
        return self is not FeatureMode.SSIM_ONLY


def _digest(obj):
    blob = json.dumps(obj, sort_keys=True, ensure_ascii=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Vocabulary:
    chars: tuple
    corpus_digest: str = ""

    def __post_init__(self):
        if len(set(self.chars)) != len(self.chars):
            raise ValueError("vocabulary characters must be unique")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.chars)})

    @property
    def index(self):
        return self._index

    def __len__(self):
        return len(self.chars)

    def to_dict(self):
        return {"chars": [f"{ord(c):04X}" for c in self.chars],
                "corpus_digest": self.corpus_digest}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(chr(int(h, 16)) for h in d["chars"]), d.get("corpus_digest", ""))


def build_vocabulary(samples):
    """Sorted union of the characters in every candidate domain."""
    samples = list(samples)
    if not samples:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    chars = set()
    for s in samples:
        chars.update(s.candidate)
    rows = sorted((s.candidate, s.brand, int(s.label)) for s in samples)
    return Vocabulary(tuple(sorted(chars)), _digest(rows))


@dataclass(frozen=True)
class FeatureSchema:
    mode: FeatureMode
    vocabulary: Vocabulary | None = None
    render_config_digest: str | None = None
    ssim_params: SsimParams | None = None
    vocabulary_source: str = "candidate"

    def __post_init__(self):
        object.__setattr__(self, "mode", FeatureMode.parse(self.mode))
        if self.mode.uses_unigrams and self.vocabulary is None:
            raise SchemaMismatch(f"{self.mode.value} schema needs a vocabulary")
        if self.mode.uses_ssim and self.ssim_params is None:
            object.__setattr__(self, "ssim_params", SsimParams())

    @property
    def dim(self):
        n = len(self.vocabulary) if self.mode.uses_unigrams else 0
        return n + (1 if self.mode.uses_ssim else 0)

    @property
    def columns(self):
        cols = ["ssim"] if self.mode.uses_ssim else []
        if self.mode.uses_unigrams:
            cols += [f"u+{ord(c):04X}" for c in self.vocabulary.chars]
        return cols

    def to_dict(self):
        return {
            "mode": self.mode.value,
            "vocabulary": self.vocabulary.to_dict() if self.mode.uses_unigrams else None,
            "render_config_digest": self.render_config_digest if self.mode.uses_ssim else None,
            "ssim_params": self.ssim_params.to_dict() if self.mode.uses_ssim else None,
            "vocabulary_source": self.vocabulary_source,
            "columns": "ssim-first" if self.mode is FeatureMode.COMBINED else "single-block",
        }

    @classmethod
    def from_dict(cls, d):
        vocab = Vocabulary.from_dict(d["vocabulary"]) if d.get("vocabulary") else None
        params = SsimParams(**d["ssim_params"]) if d.get("ssim_params") else None
        return cls(d["mode"], vocab, d.get("render_config_digest"), params,
                   d.get("vocabulary_source", "candidate"))

    def digest(self):
        return _digest(self.to_dict())


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema_digest: str


def make_schema(mode, samples=None, renderer=None, params=None):
    """Schema for ``mode``; unigram modes build their vocabulary from ``samples``."""
    mode = FeatureMode.parse(mode)
    vocab = build_vocabulary(samples) if mode.uses_unigrams else None
    render_digest = None
    if mode.uses_ssim:
        if renderer is None:
            renderer = get_renderer()
        render_digest = renderer.digest
        if params is None:
            params = SsimParams.for_bits(renderer.config.bits_per_pixel)
    return FeatureSchema(mode, vocab, render_digest, params)


def _unigram_row(domain, vocab, out):
    idx = vocab.index
    for ch in set(domain):
        j = idx.get(ch)
        if j is not None:
            out[j] = 1.0


def unigram_vector(domain, vocab):
    """Presence bits of each vocabulary character; unknown characters are dropped."""
    values = np.zeros(len(vocab))
    _unigram_row(domain, vocab, values)
    return FeatureVector(values, FeatureSchema(FeatureMode.UNIGRAM_ONLY, vocab).digest())


def _check_renderer(schema, renderer):
    if schema.mode.uses_ssim and renderer is not None:
        d = getattr(renderer, "digest", None)
        if d is not None and schema.render_config_digest is not None \
                and d != schema.render_config_digest:
            raise SchemaMismatch(f"renderer {d} does not match schema render "
                                 f"config {schema.render_config_digest}")


def featurize(sample, schema, renderer=None):
    return FeatureVector(featurize_matrix([sample], schema, renderer)[0], schema.digest())


def ssim_column(samples, renderer=None, params=None):
    return np.array([domain_ssim(s.candidate, s.brand, renderer, params).mean_ssim
                     for s in samples])


def featurize_matrix(samples, schema, renderer=None, ssim_values=None):
    """Dense (n_samples, schema.dim) matrix.

    ``ssim_values`` may carry precomputed mean SSIMs (one per sample) so
    cross-validation does not re-render the corpus per fold.
    """
    samples = list(samples)
    if schema.mode.uses_ssim and ssim_values is None:
        _check_renderer(schema, renderer)
        ssim_values = ssim_column(samples, renderer, schema.ssim_params)
    X = np.zeros((len(samples), schema.dim))
    col = 0
    if schema.mode.uses_ssim:
        X[:, 0] = ssim_values
        col = 1
    if schema.mode.uses_unigrams:
        for i, s in enumerate(samples):
            _unigram_row(s.candidate, schema.vocabulary, X[i, col:])
    return X


def write_feature_csv(fh, samples, schema, X):
    """CSV with the schema's column names and a trailing integer label."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(schema.columns + ["label"])
    for s, row in zip(samples, X):
        cells = [repr(float(row[0]))] if schema.mode.uses_ssim else []
        start = 1 if schema.mode.uses_ssim else 0
        cells += [str(int(v)) for v in row[start:]]
        w.writerow(cells + [int(s.label)])
