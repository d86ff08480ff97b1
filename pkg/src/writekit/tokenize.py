"""Shared tokenizer used by every component.

One tokenization, used everywhere: text is NFC-normalized, maximal runs
of letter/mark/number characters become word tokens, and every other
non-space character becomes its own single-character token. Case is
preserved; components that want case folding do it themselves.

Keeping combining marks inside word tokens matters for orthographies
where a base+combining pair has no precomposed form (g̃ and friends).
"""

import unicodedata

_WORD_CATEGORIES = ("L", "M", "N")


def _is_word_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] in _WORD_CATEGORIES


def normalize(text: str) -> str:
    """NFC-normalize; the only text normalization the toolkit applies."""
    return unicodedata.normalize("NFC", text)


def tokenize(text: str) -> list[str]:
    """Split text into word tokens and single-char punctuation tokens."""
    return [tok for tok, _, _ in tokenize_with_spans(text)]


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Tokenize and report (token, start, end) character offsets.

    Offsets index into the NFC-normalized text (normalize(text)); for
    already-normalized input they match the input string directly.
    """
    text = normalize(text)
    out: list[tuple[str, int, int]] = []
    start = None
    for i, ch in enumerate(text):
        if _is_word_char(ch):
            if start is None:
                start = i
            continue
        if start is not None:
            out.append((text[start:i], start, i))
            start = None
        if not ch.isspace():
            out.append((ch, i, i + 1))
    if start is not None:
        out.append((text[start:], start, len(text)))
    return out


def is_word_token(token: str) -> bool:
    """True when the token contains at least one letter."""
    return any(unicodedata.category(ch).startswith("L") for ch in token)
