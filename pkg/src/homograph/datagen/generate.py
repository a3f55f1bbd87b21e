"""Synthetic corpus generation.

Homographs substitute confusable characters into a brand's name labels;
non-homographs overwrite a large share of the name with unrelated
alphanumerics (optionally also changing the length).  Every function is a
pure function of its inputs and seed.
"""
import logging
import math
import string
import unicodedata
from enum import Enum
from importlib import resources

import numpy as np

from ..errors import NoConfusableCoverage
from .corpus import Label, LabeledSample, Origin
from .idn import decode_domain

log = logging.getLogger(__name__)

ALNUM = string.ascii_lowercase + string.digits

# ASCII look-alikes that must never serve as "dissimilar" replacements
ASCII_LOOKALIKES = ("o0", "l1i", "s5", "g9q", "z2", "b6", "uv", "mn", "rn", "ce")


def _ascii_confusables(ch):
    out = set()
    for group in ASCII_LOOKALIKES:
        if ch in group:
            out.update(group)
    out.discard(ch)
    return out


def split_tld(domain):
    """Index where the final label starts (len(domain) + 1 when dotless)."""
    dot = domain.rfind(".")
    return dot + 1 if dot >= 0 else len(domain) + 1


def name_positions(domain):
    """Positions before the final label, excluding dots."""
    stop = split_tld(domain) - 1
    return [i for i in range(min(stop, len(domain))) if domain[i] != "."]


def generate_homographs(brand, table, max_substitutions=4, budget=20, rng_seed=0,
                        max_attempts=None):
    """Up to ``budget`` distinct confusable substitutions of ``brand``.

    Each candidate replaces 1..max_substitutions positions of the non-TLD
    labels by a confusable drawn from ``table``.
    """
    if max_substitutions < 1 or budget < 1:
        raise ValueError("max_substitutions and budget must be >= 1")
    eligible = [i for i in name_positions(brand) if brand[i] in table]
    if not eligible:
        raise NoConfusableCoverage(f"no confusable characters in {brand!r}")
    choices = {i: sorted(table.get(brand[i])) for i in eligible}
    rng = np.random.default_rng(rng_seed)
    k_max = min(max_substitutions, len(eligible))
    attempts = max_attempts or 100 * budget + 1000
    seen = set()
    out = []
    for _ in range(attempts):
        if len(out) >= budget:
            break
        k = int(rng.integers(1, k_max + 1))
        pos = rng.choice(len(eligible), size=k, replace=False)
        chars = list(brand)
        for p in sorted(pos):
            i = eligible[p]
            opts = choices[i]
            chars[i] = opts[int(rng.integers(len(opts)))]
        cand = unicodedata.normalize("NFC", "".join(chars))
        if cand == brand or cand in seen or len(cand) != len(brand):
            continue
        seen.add(cand)
        out.append(LabeledSample(cand, brand, Label.HOMOGRAPH, Origin.CONFUSABLE_SUB))
    return out


def _dissimilar_options(ch, table):
    banned = {ch} | _ascii_confusables(ch)
    if table is not None:
        banned |= set(table.get(ch))
        banned |= {a for a in ALNUM if ch in table.get(a)}
    return [a for a in ALNUM if a not in banned]


def _mutate(brand, rng, table, min_diff_fraction):
    positions = [i for i in name_positions(brand) if brand[i].isalnum()]
    if not positions:
        return None
    need = max(1, math.ceil(min_diff_fraction * len(positions) - 1e-9))
    m = int(rng.integers(need, len(positions) + 1))
    picks = sorted(rng.choice(len(positions), size=m, replace=False))
    chars = list(brand)
    for p in picks:
        i = positions[p]
        opts = _dissimilar_options(brand[i], table)
        chars[i] = opts[int(rng.integers(len(opts)))]
    return "".join(chars)


def _change_length(domain, rng):
    stop = split_tld(domain) - 1
    name, rest = domain[:stop], domain[stop:]
    k = int(rng.integers(1, 4))
    if rng.random() < 0.5 or len(name) <= k + 1:
        for _ in range(k):
            at = int(rng.integers(0, len(name) + 1))
            name = name[:at] + ALNUM[int(rng.integers(len(ALNUM)))] + name[at:]
    else:
        for _ in range(k):
            at = int(rng.integers(0, len(name)))
            if name[at] != "." and len(name) > 1:
                name = name[:at] + name[at + 1:]
    return name + rest


def generate_nonhomographs(brand, count=1, rng_seed=0, table=None,
                           length_change_fraction=0.25, min_diff_fraction=0.4,
                           max_attempts=None):
    """Candidates that look clearly unlike ``brand``.

    Length-preserving candidates overwrite at least ``min_diff_fraction`` of
    the alphanumeric name characters with alphanumerics that are neither the
    original nor one of its confusables.  With probability
    ``length_change_fraction`` the mutated name also grows or shrinks by
    1-3 characters.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(rng_seed)
    attempts = max_attempts or 100 * count + 1000
    seen = set()
    out = []
    for _ in range(attempts):
        if len(out) >= count:
            break
        change = rng.random() < length_change_fraction
        cand = _mutate(brand, rng, table, min_diff_fraction)
        if cand is None:
            cand, change = brand, True
        if change:
            cand = _change_length(cand, rng)
            if len(cand) == len(brand):
                continue
        if cand == brand or cand in seen or cand.startswith(".") or ".." in cand:
            continue
        seen.add(cand)
        out.append(LabeledSample(cand, brand, Label.NON_HOMOGRAPH, Origin.DISSIMILAR_MUT))
    return out


class Registration(str, Enum):
    REGISTERED = "registered"
    UNREGISTERED = "unregistered"
    UNKNOWN = "unknown"


class NullRegistrationChecker:
    """Registration lookup that knows nothing; filters no candidate."""

    def check(self, domain):
        return Registration.UNKNOWN


def generate_corpus(brands, table, per_brand=20, neg_ratio=2.0, seed=0,
                    max_substitutions=4, length_change_fraction=0.25,
                    registration_checker=None):
    """Homographs and non-homographs for every brand, deduplicated.

    A candidate is kept with the first brand that produced it, candidates that
    are brands themselves are dropped, and candidates the registration checker
    reports as unregistered are filtered out.
    """
    checker = registration_checker or NullRegistrationChecker()
    brand_set = set(brands)
    seen = set()
    samples = []
    n_neg = max(1, int(round(per_brand * neg_ratio)))
    for b_idx, brand in enumerate(brands):
        pos_seed, neg_seed = np.random.SeedSequence([seed, b_idx]).generate_state(2)
        try:
            pos = generate_homographs(brand, table, max_substitutions, per_brand,
                                      int(pos_seed))
        except NoConfusableCoverage:
            log.warning("skipping %s: no confusable coverage", brand)
            pos = []
        neg = generate_nonhomographs(brand, n_neg, int(neg_seed), table,
                                     length_change_fraction)
        for s in pos + neg:
            if s.candidate in seen or s.candidate in brand_set:
                continue
            if checker.check(s.candidate) == Registration.UNREGISTERED:
                continue
            seen.add(s.candidate)
            samples.append(s)
    return samples


def load_brands(path=None):
    """Brand domains, one per line (``#`` comments); bundled list by default."""
    if path is None:
        text = (resources.files("homograph") / "data" / "brands.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(decode_domain(line))
    return out
