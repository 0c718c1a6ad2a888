#!/usr/bin/env python3
"""Regenerates data/translit/devanagari_latin.tsv.

Romanization follows common Hinglish spelling (aa, ee, oo; no diacritics).
Every consonant gets entries for its bare form (inherent a), its virama
form, and each vowel sign, so greedy longest-match handles conjuncts.
"""
import sys
import unicodedata

CONSONANTS = [
    ("क", "k"), ("ख", "kh"), ("ग", "g"), ("घ", "gh"), ("ङ", "ng"),
    ("च", "ch"), ("छ", "chh"), ("ज", "j"), ("झ", "jh"), ("ञ", "ny"),
    ("ट", "t"), ("ठ", "th"), ("ड", "d"), ("ढ", "dh"), ("ण", "n"),
    ("त", "t"), ("थ", "th"), ("द", "d"), ("ध", "dh"), ("न", "n"),
    ("प", "p"), ("फ", "ph"), ("ब", "b"), ("भ", "bh"), ("म", "m"),
    ("य", "y"), ("र", "r"), ("ल", "l"), ("व", "v"), ("श", "sh"),
    ("ष", "sh"), ("स", "s"), ("ह", "h"), ("ळ", "l"),
    # nukta forms
    ("क़", "q"), ("ख़", "kh"), ("ग़", "gh"), ("ज़", "z"),
    ("ड़", "d"), ("ढ़", "rh"), ("फ़", "f"), ("य़", "y"),
]

VOWEL_SIGNS = [
    ("ा", "aa"), ("ि", "i"), ("ी", "ee"), ("ु", "u"),
    ("ू", "oo"), ("ृ", "ri"), ("े", "e"), ("ै", "ai"),
    ("ो", "o"), ("ौ", "au"), ("ॉ", "o"), ("ॅ", "e"),
]

VIRAMA = "्"

INDEPENDENT = [
    ("अ", "a"), ("आ", "aa"), ("इ", "i"), ("ई", "ee"), ("उ", "u"), ("ऊ", "oo"),
    ("ऋ", "ri"), ("ए", "e"), ("ऐ", "ai"), ("ओ", "o"), ("औ", "au"), ("ऑ", "o"),
    ("ऍ", "e"),
]

SIGNS = [
    ("ं", "n"),   # anusvara
    ("ँ", "n"),   # candrabindu
    ("ः", "h"),   # visarga
    ("़", ""),    # stray nukta
    ("ऽ", ""),    # avagraha
    ("।", "."),   # danda
    ("॥", "."),   # double danda
]

DIGITS = [(chr(0x0966 + d), str(d)) for d in range(10)]


def rows():
    for cons, base in CONSONANTS:
        yield cons, base + "a"
        yield cons + VIRAMA, base
        for sign, vowel in VOWEL_SIGNS:
            yield cons + sign, base + vowel
    yield from INDEPENDENT
    # vowel signs that survive without a consonant (malformed input)
    yield from VOWEL_SIGNS
    yield VIRAMA, ""
    yield from SIGNS
    yield from DIGITS


def main(out):
    seen = set()
    out.write("# Devanagari -> Latin (Hinglish-style romanization)\n")
    out.write("# source<TAB>target; generated by tools/gen_devanagari_table.py\n")
    for src, dst in rows():
        src = unicodedata.normalize("NFC", src)
        if src in seen:
            raise SystemExit(f"duplicate source {src!r}")
        seen.add(src)
        out.write(f"{src}\t{dst}\n")


if __name__ == "__main__":
    main(sys.stdout)
