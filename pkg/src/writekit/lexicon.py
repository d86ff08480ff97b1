"""Dictionary lookup: exact, approximate (edit distance), and prefix.

The lexicon is an in-memory structure sized for the dictionaries this
toolkit targets (10^3..10^4 headwords), so approximate lookup is a
pruned linear scan and prefix completion is a bisect over the sorted
headword list. Entries loaded from JSONL merge on duplicate headwords:
glosses concatenate in file order, frequencies add, first non-empty
pos/source win.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field

from .errors import DataError, FormatError
from .tokenize import is_word_token, normalize, tokenize


@dataclass(frozen=True)
class Gloss:
    lang: str
    text: str


@dataclass
class LexiconEntry:
    headword: str
    glosses: list[Gloss] = field(default_factory=list)
    pos: str = ""
    freq: int = 0
    source: str = ""


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode scalar values."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_within(a: str, b: str, limit: int) -> int | None:
    """levenshtein(a, b) if it is <= limit, else None.

    Same DP with early abandon once a full row exceeds the limit.
    """
    if limit < 0:
        return None
    if a == b:
        return 0
    if abs(len(a) - len(b)) > limit:
        return None
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a) if len(a) <= limit else None
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if min(cur) > limit:
            return None
        prev = cur
    return prev[-1] if prev[-1] <= limit else None


class Lexicon:
    def __init__(self, entries: list[LexiconEntry]):
        merged: dict[str, LexiconEntry] = {}
        for e in entries:
            head = normalize(e.headword).strip()
            if not head:
                raise DataError("lexicon entry with empty headword")
            if head in merged:
                tgt = merged[head]
                tgt.glosses.extend(e.glosses)
                tgt.freq += e.freq
                if not tgt.pos:
                    tgt.pos = e.pos
                if not tgt.source:
                    tgt.source = e.source
            else:
                merged[head] = LexiconEntry(
                    headword=head,
                    glosses=list(e.glosses),
                    pos=e.pos,
                    freq=e.freq,
                    source=e.source,
                )
        self._by_head = merged
        self._sorted_heads = sorted(merged)

    def __len__(self):
        return len(self._by_head)

    def __contains__(self, word: str) -> bool:
        return normalize(word) in self._by_head

    def entries(self) -> list[LexiconEntry]:
        return [self._by_head[h] for h in self._sorted_heads]

    def get(self, headword: str) -> LexiconEntry | None:
        return self._by_head.get(normalize(headword))

    def total_freq(self) -> int:
        return sum(e.freq for e in self._by_head.values())

    def lookup_approx(
        self, query: str, max_dist: int = 2, k: int = 10
    ) -> list[tuple[LexiconEntry, int]]:
        """Entries within max_dist edits, ordered by (dist, -freq, headword)."""
        if max_dist < 0:
            raise DataError(f"max_dist must be >= 0, got {max_dist}")
        if k < 1:
            raise DataError(f"k must be >= 1, got {k}")
        query = normalize(query)
        hits = []
        for head in self._sorted_heads:
            d = levenshtein_within(query, head, max_dist)
            if d is not None:
                hits.append((self._by_head[head], d))
        hits.sort(key=lambda item: (item[1], -item[0].freq, item[0].headword))
        return hits[:k]

    def complete_prefix(self, prefix: str, k: int = 10) -> list[LexiconEntry]:
        """Entries whose headword starts with prefix, by (-freq, headword).

        Empty prefix matches everything.
        """
        if k < 1:
            raise DataError(f"k must be >= 1, got {k}")
        prefix = normalize(prefix)
        if prefix:
            lo = bisect_left(self._sorted_heads, prefix)
            hi = lo
            while hi < len(self._sorted_heads) and self._sorted_heads[hi].startswith(prefix):
                hi += 1
            heads = self._sorted_heads[lo:hi]
        else:
            heads = self._sorted_heads
        matches = [self._by_head[h] for h in heads]
        matches.sort(key=lambda e: (-e.freq, e.headword))
        return matches[:k]


def load_lexicon(path) -> Lexicon:
    """Load a JSONL lexicon; raises FormatError naming the bad line."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(
                    f"invalid JSON ({exc.msg})", line=lineno, path=str(path)
                ) from exc
            if not isinstance(obj, dict) or "headword" not in obj:
                raise FormatError(
                    "object must have a 'headword' key", line=lineno, path=str(path)
                )
            glosses = []
            for g in obj.get("glosses", []):
                if not isinstance(g, dict) or "lang" not in g or "text" not in g:
                    raise FormatError(
                        "gloss must be an object with 'lang' and 'text'",
                        line=lineno,
                        path=str(path),
                    )
                glosses.append(Gloss(lang=g["lang"], text=g["text"]))
            freq = obj.get("freq", 0)
            if not isinstance(freq, int) or freq < 0:
                raise FormatError(
                    f"freq must be a non-negative integer, got {freq!r}",
                    line=lineno,
                    path=str(path),
                )
            entries.append(
                LexiconEntry(
                    headword=obj["headword"],
                    glosses=glosses,
                    pos=obj.get("pos", ""),
                    freq=freq,
                    source=obj.get("source", ""),
                )
            )
    return Lexicon(entries)


def save_lexicon(lexicon: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in lexicon.entries():
            obj = {
                "headword": e.headword,
                "glosses": [{"lang": g.lang, "text": g.text} for g in e.glosses],
            }
            if e.pos:
                obj["pos"] = e.pos
            if e.freq:
                obj["freq"] = e.freq
            if e.source:
                obj["source"] = e.source
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def with_corpus_frequencies(lexicon: Lexicon, sentences: list[str]) -> Lexicon:
    """New lexicon whose freq counts are taken from corpus word tokens.

    Surface forms are matched to headwords exactly; tokens that are not
    headwords are ignored.
    """
    counts: dict[str, int] = {}
    for sentence in sentences:
        for tok in tokenize(sentence):
            if is_word_token(tok) and tok in lexicon:
                counts[normalize(tok)] = counts.get(normalize(tok), 0) + 1
    entries = [
        LexiconEntry(
            headword=e.headword,
            glosses=list(e.glosses),
            pos=e.pos,
            freq=counts.get(e.headword, 0),
            source=e.source,
        )
        for e in lexicon.entries()
    ]
    return Lexicon(entries)
