"""Domain normalization: Punycode label decoding, NFC, lowercase."""
import unicodedata

from ..errors import PunycodeError


def decode_label(label):
    if label[:4].lower() != "xn--":
        return label
    body = label[4:]
    try:
        decoded = body.encode("ascii").decode("punycode")
    except (UnicodeError, ValueError) as exc:
        raise PunycodeError(f"invalid Punycode label {label!r}: {exc}") from None
    if not decoded:
        raise PunycodeError(f"invalid Punycode label {label!r}: empty")
    bad = [c for c in decoded if unicodedata.category(c) in ("Cc", "Cn", "Cs")]
    if bad:
        raise PunycodeError(f"invalid Punycode label {label!r}: decodes to "
                            f"disallowed codepoint U+{ord(bad[0]):04X}")
    if decoded.encode("punycode").decode("ascii").lower() != body.lower():
        raise PunycodeError(f"invalid Punycode label {label!r}: not canonical")
    return decoded


def encode_label(label):
    if label.isascii():
        return label
    return "xn--" + label.encode("punycode").decode("ascii")


def decode_domain(raw):
    """Decode ``xn--`` labels and return the NFC, lowercased Unicode form."""
    raw = raw.strip()
    labels = [decode_label(lab) for lab in raw.split(".")]
    return unicodedata.normalize("NFC", ".".join(labels).lower())


def encode_domain(domain):
    return ".".join(encode_label(lab) for lab in domain.split("."))
