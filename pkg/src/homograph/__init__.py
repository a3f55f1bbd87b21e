"""Visual homograph detection from glyph SSIM and character-presence features."""
__version__ = "0.1.0"
