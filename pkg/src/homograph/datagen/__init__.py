"""Corpus generation, confusables parsing and domain normalization."""
from .confusables import (ConfusablesTable, load_confusables, parse_confusables,
                          prune_indistinguishable)
from .corpus import Label, LabeledSample, Origin, load_corpus, save_corpus
from .generate import (NullRegistrationChecker, Registration, generate_corpus,
                       generate_homographs, generate_nonhomographs, load_brands)
from .idn import decode_domain, encode_domain

__all__ = [
    "ConfusablesTable", "Label", "LabeledSample", "NullRegistrationChecker", "Origin",
    "Registration", "decode_domain", "encode_domain", "generate_corpus",
    "generate_homographs", "generate_nonhomographs", "load_brands", "load_confusables",
    "load_corpus", "parse_confusables", "prune_indistinguishable", "save_corpus",
]
