"""Regenerate src/homograph/data/confusables.txt.

The table pairs each ASCII lowercase letter with (a) precomposed Latin
letters whose canonical decomposition starts with it, (b) a hand-picked set
of Cyrillic, Greek and Latin look-alikes, and (c) digit look-alikes.  A few
multi-codepoint rows are kept so the parser's skip path sees real data.
"""
import string
import sys
import unicodedata
from pathlib import Path

LOOKALIKES = {
    "a": "аαɑ",
    "b": "ƄЬ",
    "c": "сϲⅽ",
    "d": "ԁⅾ",
    "e": "ееҽ",
    "g": "ɡ",
    "h": "һհ",
    "i": "іıιɩ",
    "j": "јϳ",
    "k": "κк",
    "l": "ӏłɩⅼ",
    "m": "м",
    "n": "ոп",
    "o": "оοøօɵ",
    "p": "рρ",
    "q": "ԛզ",
    "r": "г",
    "s": "ѕ",
    "t": "т",
    "u": "սυ",
    "v": "νѵ",
    "w": "ԝѡ",
    "x": "хχ",
    "y": "уү",
    "z": "ᴢ",
}
DIGITS = {"o": "0", "l": "1", "i": "1", "s": "5", "b": "6", "g": "9", "z": "2"}
MULTI = [
    ("006D", "0072 006E", "m looks like rn"),
    ("0077", "0076 0076", "w looks like vv"),
    ("0066 0066", "FB00", "ff ligature"),
    ("0064", "0063 006C", "d looks like cl"),
]


def name(ch):
    return unicodedata.name(ch, f"U+{ord(ch):04X}")


def rows():
    seen = set()
    for base in string.ascii_lowercase:
        targets = []
        for cp in list(range(0x00C0, 0x0250)) + list(range(0x1E00, 0x1F00)):
            ch = chr(cp)
            nfd = unicodedata.normalize("NFD", ch)
            if ch.islower() and len(nfd) > 1 and nfd[0] == base:
                targets.append(ch)
        targets += list(LOOKALIKES.get(base, ""))
        for t in targets:
            if (base, t) in seen or t == base:
                continue
            seen.add((base, t))
            yield f"{ord(t):04X} ;\t{ord(base):04X} ;\tMA\t# ( {t} → {base} ) {name(t)} → {name(base)}"
    for base, digit in DIGITS.items():
        yield f"{ord(digit):04X} ;\t{ord(base):04X} ;\tMA\t# ( {digit} → {base} ) {name(digit)} → {name(base)}"
    for src, dst, note in MULTI:
        yield f"{src} ;\t{dst} ;\tMA\t# {note}"


def main(out):
    header = [
        "# Confusable character pairs for homograph generation.",
        "# Format: source_hex ; target_hex_sequence ; class # comment",
        "# Generated by scripts/build_confusables.py; do not edit by hand.",
        "",
    ]
    Path(out).write_text("\n".join(header + list(rows())) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         Path(__file__).resolve().parents[1] / "src/homograph/data/confusables.txt")
