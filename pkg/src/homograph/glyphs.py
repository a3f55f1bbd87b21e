"""Rasterize single codepoints to fixed-size grayscale bitmaps.

Glyphs come from an ordered font stack: the first font whose cmap covers a
codepoint renders it.  Each font is drawn at the size where its ascent +
descent fills the unpadded height, on the primary font's baseline, and each
glyph's ink box is centered horizontally.  Codepoints no font covers get
a hollow "tofu" box and ``rendered_with_fallback=True``.
"""
import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from fontTools.ttLib import TTFont, TTLibError
from PIL import Image, ImageDraw, ImageFont

from .errors import ConfigError, DataError, FontLoadError

log = logging.getLogger(__name__)


def bundled_font():
    """Path of the DejaVu Sans copy shipped with the package."""
    return str(resources.files("homograph") / "data" / "DejaVuSans.ttf")


@dataclass(frozen=True)
class RenderConfig:
    bitmap_side: int = 64
    bits_per_pixel: int = 8
    font_sources: tuple = field(default_factory=lambda: (bundled_font(),))
    background_level: int = 0
    foreground_level: int | None = None
    padding_fraction: float = 0.125

    def __post_init__(self):
        # accept any sequence of paths, store an immutable tuple
        object.__setattr__(self, "font_sources",
                           tuple(str(p) for p in self.font_sources))
        if self.foreground_level is None and self.bits_per_pixel in (8, 16):
            object.__setattr__(self, "foreground_level", self.max_level)
        self.validate()

    @property
    def max_level(self):
        return 2 ** self.bits_per_pixel - 1

    @property
    def fg(self):
        return self.max_level if self.foreground_level is None else self.foreground_level

    def validate(self):
        if self.bitmap_side < 8:
            raise ConfigError(f"bitmap_side must be >= 8, got {self.bitmap_side}")
        if self.bits_per_pixel not in (8, 16):
            raise ConfigError(f"bits_per_pixel must be 8 or 16, got {self.bits_per_pixel}")
        if not self.font_sources:
            raise ConfigError("font_sources is empty")
        if not 0 <= self.padding_fraction < 0.5:
            raise ConfigError(f"padding_fraction must lie in [0, 0.5), got {self.padding_fraction}")
        for name, level in (("background_level", self.background_level),
                            ("foreground_level", self.fg)):
            if not 0 <= level <= self.max_level:
                raise ConfigError(f"{name}={level} outside [0, {self.max_level}]")

    def to_dict(self):
        return {
            "bitmap_side": self.bitmap_side,
            "bits_per_pixel": self.bits_per_pixel,
            "font_sources": list(self.font_sources),
            "background_level": self.background_level,
            "foreground_level": self.fg,
            "padding_fraction": self.padding_fraction,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def digest(self):
        """Hash of the parameters and of the font file contents."""
        payload = self.to_dict()
        payload["font_sha256"] = [_file_sha256(p) for p in self.font_sources]
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_file_hashes = {}


def _file_sha256(path):
    key = str(path)
    if key not in _file_hashes:
        try:
            _file_hashes[key] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        except OSError:
            _file_hashes[key] = "missing"
    return _file_hashes[key]


@dataclass(frozen=True, eq=False)
class GlyphBitmap:
    codepoint: int
    side: int
    pixels: np.ndarray  # (side, side), read-only
    rendered_with_fallback: bool

    def __eq__(self, other):
        if not isinstance(other, GlyphBitmap):
            return NotImplemented
        return (self.codepoint == other.codepoint and self.side == other.side
                and self.rendered_with_fallback == other.rendered_with_fallback
                and np.array_equal(self.pixels, other.pixels))

    __hash__ = None


def _as_codepoint(c):
    if isinstance(c, str) and len(c) != 1:
        raise DataError(f"expected a single character, got {c!r}")
    cp = ord(c) if isinstance(c, str) else int(c)
    if not (0 <= cp <= 0x10FFFF) or 0xD800 <= cp <= 0xDFFF:
        raise DataError(f"not a Unicode scalar value: {cp:#x}")
    return cp


class _LoadedFont:
    def __init__(self, path, cmap, units_per_em, ascent, descent):
        self.path = path
        self.cmap = cmap
        self.units_per_em = units_per_em
        self.ascent = ascent
        self.descent = descent  # negative, font units
        self.faces = {}

    def face(self, px):
        if px not in self.faces:
            self.faces[px] = ImageFont.truetype(self.path, px)
        return self.faces[px]


def _load_font(path):
    try:
        tt = TTFont(path, lazy=True)
        cmap = frozenset(tt.getBestCmap() or ())
        upem = tt["head"].unitsPerEm
        hhea = tt["hhea"]
        ascent, descent = hhea.ascent, hhea.descent
        tt.close()
        ImageFont.truetype(path, 12)
    except (OSError, TTLibError, KeyError, AttributeError) as exc:
        raise FontLoadError(f"cannot load font {path}: {exc}") from exc
    return _LoadedFont(path, cmap, upem, ascent, descent)


class GlyphRenderer:
    """Renders codepoints under one ``RenderConfig``, caching the results.

    Concurrent ``render`` calls are safe: rasterization is serialized by a
    lock and cache inserts are idempotent.
    """

    def __init__(self, config=None):
        self.config = config or RenderConfig()
        self.config.validate()
        self.digest = self.config.digest()
        self._fonts = None
        self._lock = threading.Lock()

    def _load(self):
        fonts = []
        for path in self.config.font_sources:
            try:
                fonts.append(_load_font(path))
            except FontLoadError as exc:
                log.warning("%s", exc)
        if not fonts:
            raise FontLoadError("no usable font in font_sources: "
                                + ", ".join(self.config.font_sources))
        cfg = self.config
        usable = cfg.bitmap_side * (1.0 - 2.0 * cfg.padding_fraction)
        primary = fonts[0]
        pad = cfg.bitmap_side * cfg.padding_fraction
        self._baseline = int(round(pad + usable * primary.ascent
                                   / (primary.ascent - primary.descent)))
        self._px = [max(1, int(usable * f.units_per_em / (f.ascent - f.descent)))
                    for f in fonts]
        self._fonts = fonts

    def covers(self, codepoint):
        if self._fonts is None:
            with self._lock:
                if self._fonts is None:
                    self._load()
        return any(_as_codepoint(codepoint) in f.cmap for f in self._fonts)

    def render(self, codepoint):
        cp = _as_codepoint(codepoint)
        key = (cp, self.digest)
        hit = _CACHE.get(key)
        if hit is not None:
            return hit
        bmp = self._render_uncached(cp)
        return _CACHE.setdefault(key, bmp)

    def _render_uncached(self, cp):
        with self._lock:
            if self._fonts is None:
                self._load()
            cfg = self.config
            side = cfg.bitmap_side
            img = Image.new("L", (side, side), 0)
            draw = ImageDraw.Draw(img)
            fallback = True
            for font, px in zip(self._fonts, self._px):
                if cp not in font.cmap:
                    continue
                face = font.face(px)
                ch = chr(cp)
                x0, _, x1, _ = face.getbbox(ch, anchor="ls")
                x = (side - (x1 - x0)) // 2 - x0
                draw.text((x, self._baseline), ch, fill=255, font=face, anchor="ls")
                fallback = False
                break
            if fallback:
                pad = int(round(side * cfg.padding_fraction))
                width = max(1, side // 32)
                draw.rectangle((pad, pad, side - 1 - pad, side - 1 - pad),
                               outline=255, width=width)
        coverage = np.asarray(img, dtype=np.int64)
        bg, fg = cfg.background_level, cfg.fg
        levels = bg + np.rint((fg - bg) * coverage / 255.0).astype(np.int64)
        dtype = np.uint8 if cfg.bits_per_pixel == 8 else np.uint16
        pixels = levels.astype(dtype)
        pixels.setflags(write=False)
        return GlyphBitmap(cp, side, pixels, fallback)


_CACHE = {}
_RENDERERS = {}
_RENDERERS_LOCK = threading.Lock()


def get_renderer(config=None):
    """Shared renderer per config digest."""
    config = config or RenderConfig()
    d = config.digest()
    with _RENDERERS_LOCK:
        if d not in _RENDERERS:
            _RENDERERS[d] = GlyphRenderer(config)
        return _RENDERERS[d]


def render_glyph(codepoint, config=None):
    return get_renderer(config).render(codepoint)


def clear_cache():
    _CACHE.clear()
