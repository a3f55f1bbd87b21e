"""Parser for semicolon-separated confusables tables.

Each data line reads ``source_hex ; target_hex_sequence ; class # comment``.
Only single-scalar to single-scalar mappings are kept, in both directions.
"""
import hashlib
from dataclasses import dataclass, field
from importlib import resources

from ..errors import ParseError
from ..similarity import char_pair_ssim


@dataclass
class ConfusablesTable:
    mapping: dict = field(default_factory=dict)  # str -> frozenset[str]
    provenance: str = ""
    skipped_multi: int = 0
    skipped_self: int = 0

    def get(self, ch):
        return self.mapping.get(ch, frozenset())

    def __contains__(self, ch):
        return ch in self.mapping

    def __len__(self):
        return len(self.mapping)

    def pairs(self):
        return {(a, b) for a, targets in self.mapping.items() for b in targets}

    def without(self, pairs):
        """Copy of the table with the given (a, b) pairs removed both ways."""
        drop = set(pairs) | {(b, a) for a, b in pairs}
        out = {}
        for a, targets in self.mapping.items():
            keep = frozenset(b for b in targets if (a, b) not in drop)
            if keep:
                out[a] = keep
        return ConfusablesTable(out, self.provenance, self.skipped_multi, self.skipped_self)


def _scalars(field_text, lineno):
    parts = field_text.split()
    if not parts:
        raise ParseError("empty codepoint field", lineno)
    try:
        cps = [int(p, 16) for p in parts]
    except ValueError:
        raise ParseError(f"malformed hex in {field_text.strip()!r}", lineno) from None
    for cp in cps:
        if not (0 <= cp <= 0x10FFFF) or 0xD800 <= cp <= 0xDFFF:
            raise ParseError(f"not a Unicode scalar: {cp:X}", lineno)
    return "".join(chr(c) for c in cps)


def parse_confusables(text, provenance=""):
    pairs = {}
    skipped_multi = skipped_self = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].lstrip("﻿").strip()
        if not line:
            continue
        fields = line.split(";")
        if len(fields) < 2 or not fields[1].strip():
            raise ParseError("expected 'source ; target ; class'", lineno)
        src = _scalars(fields[0], lineno)
        dst = _scalars(fields[1], lineno)
        if len(src) != 1 or len(dst) != 1:
            skipped_multi += 1
            continue
        if src == dst:
            skipped_self += 1
            continue
        pairs.setdefault(src, set()).add(dst)
        pairs.setdefault(dst, set()).add(src)
    if not provenance:
        provenance = "sha256:" + hashlib.sha256(text.encode()).hexdigest()[:16]
    mapping = {k: frozenset(v) for k, v in pairs.items()}
    return ConfusablesTable(mapping, provenance, skipped_multi, skipped_self)


def load_confusables(path=None):
    """Parse a confusables file; the bundled table when ``path`` is None."""
    if path is None:
        res = resources.files("homograph") / "data" / "confusables.txt"
        text = res.read_text(encoding="utf-8")
        path = "<bundled confusables.txt>"
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return parse_confusables(text, provenance=f"{path} sha256:{digest}")


def prune_indistinguishable(table, renderer, params=None):
    """Drop pairs whose glyphs render bit-identically (SSIM exactly 1).

    Cyrillic/Latin twins share outlines in many fonts; such substitutions
    leave no visual trace for the SSIM feature.
    """
    same = {(a, b) for a, b in table.pairs()
            if char_pair_ssim(a, b, renderer, params) >= 1.0}
    return table.without(same)
