"""Labeled samples and their JSONL corpus format."""
import json
import unicodedata
from dataclasses import dataclass
from enum import Enum, IntEnum

from ..errors import DataError, SchemaError


class Label(IntEnum):
    NON_HOMOGRAPH = 0
    HOMOGRAPH = 1

    @property
    def text(self):
        return self.name.lower()

    @classmethod
    def parse(cls, value):
        if isinstance(value, str):
            return cls[value.strip().upper()]
        return cls(int(value))


class Origin(str, Enum):
    CONFUSABLE_SUB = "confusable_sub"
    DISSIMILAR_MUT = "dissimilar_mut"
    EXTERNAL = "external"


@dataclass(frozen=True)
class LabeledSample:
    candidate: str
    brand: str
    label: Label
    origin: Origin = Origin.EXTERNAL

    def __post_init__(self):
        object.__setattr__(self, "candidate", unicodedata.normalize("NFC", self.candidate))
        object.__setattr__(self, "label", Label.parse(self.label))
        object.__setattr__(self, "origin", Origin(self.origin))
        if self.candidate == self.brand:
            raise DataError(f"candidate equals brand: {self.candidate!r}")
        if self.label == Label.HOMOGRAPH and self.origin == Origin.DISSIMILAR_MUT:
            raise DataError(f"{self.candidate!r}: dissimilar mutations cannot be homographs")

    def to_dict(self):
        return {"candidate": self.candidate, "brand": self.brand,
                "label": self.label.text, "origin": self.origin.value}


_KEYS = ("candidate", "brand", "label", "origin")


def save_corpus(samples, path, meta=None):
    """Write JSONL; ``meta`` becomes a leading ``{"__meta__": ...}`` line."""
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"__meta__": meta}, ensure_ascii=False, sort_keys=True) + "\n")
        for s in samples:
            fh.write(json.dumps(s.to_dict(), ensure_ascii=False) + "\n")


def load_corpus(path):
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", lineno) from None
            if not isinstance(obj, dict):
                raise SchemaError("expected a JSON object", lineno)
            if "__meta__" in obj:
                continue
            missing = [k for k in _KEYS if k not in obj]
            if missing:
                raise SchemaError(f"missing key(s) {', '.join(missing)}", lineno)
            try:
                samples.append(LabeledSample(obj["candidate"], obj["brand"],
                                             obj["label"], obj["origin"]))
            except (KeyError, ValueError, DataError) as exc:
                raise SchemaError(f"bad value: {exc}", lineno) from None
    return samples
