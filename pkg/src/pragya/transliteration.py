"""Devanagari to IAST romanization.

A small finite-state transducer over single codepoints with one piece of
state: the pending consonant. Devanagari consonant letters carry an inherent
"a" vowel that is realized unless the next codepoint is a dependent vowel
sign (matra) or the virama. Everything else (independent vowels, anusvara,
visarga, digits, dandas) maps codepoint-for-codepoint.

Non-Devanagari input passes through unchanged, so the function is total.
Output is NFC-normalized.
"""

from __future__ import annotations

import unicodedata

DEVANAGARI_RANGE = (0x0900, 0x097F)

INDEPENDENT_VOWELS = {
    "अ": "a", "आ": "ā", "इ": "i", "ई": "ī", "उ": "u", "ऊ": "ū",
    "ऋ": "ṛ", "ॠ": "ṝ", "ऌ": "ḷ", "ॡ": "ḹ",
    "ए": "e", "ऐ": "ai", "ओ": "o", "औ": "au",
}

CONSONANTS = {
    "क": "k", "ख": "kh", "ग": "g", "घ": "gh", "ङ": "ṅ",
    "च": "c", "छ": "ch", "ज": "j", "झ": "jh", "ञ": "ñ",
    "ट": "ṭ", "ठ": "ṭh", "ड": "ḍ", "ढ": "ḍh", "ण": "ṇ",
    "त": "t", "थ": "th", "द": "d", "ध": "dh", "न": "n",
    "प": "p", "फ": "ph", "ब": "b", "भ": "bh", "म": "m",
    "य": "y", "र": "r", "ल": "l", "व": "v",
    "श": "ś", "ष": "ṣ", "स": "s", "ह": "h",
}

# Dependent vowel signs. A matra replaces the inherent "a" of the consonant
# it attaches to.
MATRAS = {
    "ा": "ā", "ि": "i", "ी": "ī",
    "ु": "u", "ू": "ū",
    "ृ": "ṛ", "ॄ": "ṝ", "ॢ": "ḷ", "ॣ": "ḹ",
    "े": "e", "ै": "ai", "ो": "o", "ौ": "au",
}

VIRAMA = "्"

SIGNS = {
    "ं": "ṃ",   # anusvara
    "ः": "ḥ",   # visarga
    "ँ": "m̐",  # candrabindu -> m with combining candrabindu
    "ऽ": "'",   # avagraha
    "ॐ": "oṃ",  # om sign
}

DIGITS = {chr(0x0966 + i): str(i) for i in range(10)}

DANDAS = {"।": ".", "॥": "."}

# Vedic accent marks carry recitation pitch, not segmental content; dropped.
STRIPPED = frozenset(chr(cp) for cp in range(0x0951, 0x0955))

INHERENT_VOWEL = "a"


def transliterate(text: str) -> str:
    """Transliterate Devanagari ``text`` to IAST.

    Unknown codepoints (including all non-Devanagari input) pass through
    unchanged; the function never raises.
    """
    out: list[str] = []
    pending: str | None = None  # consonant base awaiting its vowel

    for ch in text:
        if ch in STRIPPED:
            continue
        if pending is not None:
            if ch == VIRAMA:
                out.append(pending)
                pending = None
                continue
            if ch in MATRAS:
                out.append(pending + MATRAS[ch])
                pending = None
                continue
            out.append(pending + INHERENT_VOWEL)
            pending = None
        if ch in CONSONANTS:
            pending = CONSONANTS[ch]
        elif ch in INDEPENDENT_VOWELS:
            out.append(INDEPENDENT_VOWELS[ch])
        elif ch in MATRAS:
            # stray matra with no consonant to attach to: emit its vowel
            out.append(MATRAS[ch])
        elif ch == VIRAMA:
            pass  # stray virama: nothing to suppress
        elif ch in SIGNS:
            out.append(SIGNS[ch])
        elif ch in DIGITS:
            out.append(DIGITS[ch])
        elif ch in DANDAS:
            out.append(DANDAS[ch])
        else:
            out.append(ch)

    if pending is not None:
        out.append(pending + INHERENT_VOWEL)

    return unicodedata.normalize("NFC", "".join(out))


def is_devanagari_ratio(text: str) -> float:
    """Fraction of non-whitespace codepoints inside the Devanagari block.

    Returns 0.0 for empty or whitespace-only input.
    """
    lo, hi = DEVANAGARI_RANGE
    relevant = [ch for ch in text if not ch.isspace()]
    if not relevant:
        return 0.0
    hits = sum(1 for ch in relevant if lo <= ord(ch) <= hi)
    return hits / len(relevant)
