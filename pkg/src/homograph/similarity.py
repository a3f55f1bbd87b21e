"""SSIM between glyph bitmaps and per-character SSIM between domains."""
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, DimensionMismatch, UndefinedForLengthMismatch
from .glyphs import GlyphBitmap, get_renderer


@dataclass(frozen=True)
class SsimParams:
    k1: float = 0.01
    k2: float = 0.03
    L: int = 255

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0 and self.L >= 1):
            raise ConfigError(f"invalid SSIM parameters {self}")

    @classmethod
    def for_bits(cls, bits_per_pixel, k1=0.01, k2=0.03):
        return cls(k1, k2, 2 ** bits_per_pixel - 1)

    @property
    def r1(self):
        return (self.k1 * self.L) ** 2

    @property
    def r2(self):
        return (self.k2 * self.L) ** 2

    def to_dict(self):
        return {"k1": self.k1, "k2": self.k2, "L": self.L}


def _pixels(img):
    if isinstance(img, GlyphBitmap):
        return img.pixels
    return np.asarray(img)


def ssim_image(x, y, params=None):
    """Global (single-window) SSIM of two equally sized images.

    Means, variances and the covariance are population statistics over all
    pixels.  When ``params`` is omitted the dynamic range follows the pixel
    dtype (255 for uint8, 65535 for uint16, else 255).
    """
    px, py = _pixels(x), _pixels(y)
    if px.shape != py.shape:
        raise DimensionMismatch(f"image shapes differ: {px.shape} vs {py.shape}")
    if params is None:
        bits = 16 if px.dtype == np.uint16 else 8
        params = SsimParams.for_bits(bits)
    a = np.ascontiguousarray(px, dtype=np.float64).ravel()
    b = np.ascontiguousarray(py, dtype=np.float64).ravel()
    return _kernels.global_ssim(a, b, params.r1, params.r2)


@dataclass(frozen=True)
class DomainSimilarity:
    candidate: str
    brand: str
    per_char_ssim: tuple = ()
    mean_ssim: float = 0.0
    diff_positions: tuple = field(default=())

    @classmethod
    def from_per_char(cls, candidate, brand, values):
        values = tuple(float(v) for v in values)
        if not values:
            return cls(candidate, brand)
        mean = math.fsum(values) / len(values)
        diffs = tuple(i for i, v in enumerate(values) if v < 1.0)
        return cls(candidate, brand, values, mean, diffs)

    @property
    def length_mismatch(self):
        return len(self.candidate) != len(self.brand)

    def to_dict(self):
        return {
            "candidate": self.candidate,
            "brand": self.brand,
            "per_char_ssim": list(self.per_char_ssim),
            "mean_ssim": self.mean_ssim,
            "diff_positions": list(self.diff_positions),
        }


_pair_cache = {}
_pair_lock = threading.Lock()


def char_pair_ssim(a, b, renderer=None, params=None):
    """SSIM of the rendered glyphs of two characters (memoized per renderer)."""
    renderer = renderer or get_renderer()
    if params is None:
        params = SsimParams.for_bits(getattr(getattr(renderer, "config", None),
                                             "bits_per_pixel", 8))
    digest = getattr(renderer, "digest", None)
    key = (digest, params, a, b) if digest is not None else None
    if key is not None:
        hit = _pair_cache.get(key)
        if hit is not None:
            return hit
    val = ssim_image(renderer.render(a), renderer.render(b), params)
    if key is not None:
        with _pair_lock:
            _pair_cache[key] = val
            _pair_cache[(digest, params, b, a)] = val
    return val


def domain_ssim(candidate, brand, renderer=None, params=None, pair_ssim=None):
    """Average character-wise SSIM of two domain strings.

    Strings of different codepoint length score 0 with no per-character
    values.  ``pair_ssim(a, b)`` may replace glyph rendering (handy for
    injecting known per-character scores).
    """
    if len(candidate) != len(brand):
        return DomainSimilarity(candidate, brand)
    if pair_ssim is None:
        def pair_ssim(a, b):
            return char_pair_ssim(a, b, renderer, params)
    values = [pair_ssim(a, b) for a, b in zip(candidate, brand)]
    return DomainSimilarity.from_per_char(candidate, brand, values)


def char_diff_ratio(sim):
    """Fraction of aligned positions whose glyph SSIM is below 1."""
    if not sim.per_char_ssim:
        raise UndefinedForLengthMismatch(
            f"{sim.candidate!r} and {sim.brand!r} differ in length")
    return len(sim.diff_positions) / len(sim.per_char_ssim)
