"""Parallel corpus ingestion, cleaning, splitting, and LM decomposition.

A corpus is an ordered list of sentence pairs. Two on-disk formats are
supported and round-trip losslessly:

- TSV: one pair per line, ``src<TAB>tgt[<TAB>source_id[<TAB>doc_id]]``
- JSONL: one object per line with keys src, tgt and optional
  source_id, doc_id

Ingestion applies NFC normalization and leading/trailing whitespace
trimming, nothing else; cleaning is a separate, explicit step.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field, replace

from .errors import DataError, FormatError
from .tokenize import normalize, tokenize

_MARKUP = re.compile(r"\[[^\[\]]*\]")


@dataclass(frozen=True)
class SentencePair:
    src: str
    tgt: str
    source_id: str = ""
    doc_id: str = ""


@dataclass
class Corpus:
    name: str
    pairs: list[SentencePair] = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def src_sentences(self) -> list[str]:
        return [p.src for p in self.pairs]

    def tgt_sentences(self) -> list[str]:
        return [p.tgt for p in self.pairs]


@dataclass(frozen=True)
class CleaningReport:
    removed_empty: int = 0
    removed_duplicates: int = 0
    removed_ratio_outliers: int = 0
    fixed_markup: int = 0
    kept: int = 0

    def to_dict(self) -> dict:
        return {
            "removed_empty": self.removed_empty,
            "removed_duplicates": self.removed_duplicates,
            "removed_ratio_outliers": self.removed_ratio_outliers,
            "fixed_markup": self.fixed_markup,
            "kept": self.kept,
        }


@dataclass(frozen=True)
class SplitSpec:
    """Either a seeded random split or a document-held-out split.

    mode "random_fraction" uses ``fraction`` and ``seed``; mode
    "held_out_doc" sends every pair whose doc_id is in ``held_doc_ids``
    to the test side.
    """

    mode: str
    fraction: float = 0.1
    seed: int = 0
    held_doc_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in ("random_fraction", "held_out_doc"):
            raise DataError(f"unknown split mode {self.mode!r}")
        if self.mode == "random_fraction" and not 0.0 < self.fraction < 1.0:
            raise DataError(f"fraction must be in (0, 1), got {self.fraction}")
        if self.mode == "held_out_doc" and not self.held_doc_ids:
            raise DataError("held_out_doc split needs at least one doc id")


def _clean_field(value: str) -> str:
    return normalize(value).strip()


def ingest(path, fmt: str = "tsv", name: str | None = None) -> Corpus:
    """Load a corpus file. Raises FormatError naming the offending line."""
    if fmt not in ("tsv", "jsonl"):
        raise DataError(f"unknown corpus format {fmt!r}")
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if fmt == "tsv":
                fields = line.split("\t")
                if not 2 <= len(fields) <= 4:
                    raise FormatError(
                        f"expected 2 to 4 tab-separated fields, got {len(fields)}",
                        line=lineno,
                        path=str(path),
                    )
                fields += [""] * (4 - len(fields))
                src, tgt, source_id, doc_id = fields
            else:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(
                        f"invalid JSON ({exc.msg})", line=lineno, path=str(path)
                    ) from exc
                if not isinstance(obj, dict) or "src" not in obj or "tgt" not in obj:
                    raise FormatError(
                        "object must have 'src' and 'tgt' keys",
                        line=lineno,
                        path=str(path),
                    )
                src = obj["src"]
                tgt = obj["tgt"]
                source_id = obj.get("source_id", "")
                doc_id = obj.get("doc_id", "")
                if not all(
                    isinstance(v, str) for v in (src, tgt, source_id, doc_id)
                ):
                    raise FormatError(
                        "src/tgt/source_id/doc_id must be strings",
                        line=lineno,
                        path=str(path),
                    )
            pairs.append(
                SentencePair(
                    src=_clean_field(src),
                    tgt=_clean_field(tgt),
                    source_id=_clean_field(source_id),
                    doc_id=_clean_field(doc_id),
                )
            )
    if name is None:
        name = str(path)
    return Corpus(name=name, pairs=pairs)


def save(corpus: Corpus, path, fmt: str = "jsonl") -> None:
    """Write a corpus so that ingest(save(c)) == c (segment-exact)."""
    if fmt not in ("tsv", "jsonl"):
        raise DataError(f"unknown corpus format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        for p in corpus.pairs:
            if fmt == "tsv":
                for seg in (p.src, p.tgt, p.source_id, p.doc_id):
                    if "\t" in seg or "\n" in seg:
                        raise DataError(
                            "segment contains a tab or newline; use jsonl format"
                        )
                row = [p.src, p.tgt]
                if p.source_id or p.doc_id:
                    row.append(p.source_id)
                if p.doc_id:
                    row.append(p.doc_id)
                fh.write("\t".join(row) + "\n")
            else:
                obj = {"src": p.src, "tgt": p.tgt}
                if p.source_id:
                    obj["source_id"] = p.source_id
                if p.doc_id:
                    obj["doc_id"] = p.doc_id
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _strip_markup(text: str) -> str:
    # Re-apply until fixpoint so nested "[[x]]" cannot survive one pass
    # and make clean() non-idempotent.
    while True:
        stripped = _MARKUP.sub(" ", text)
        if stripped == text:
            break
        text = stripped
    return text


def _normalize_pair(pair: SentencePair) -> tuple[SentencePair, bool]:
    fixed = False
    segs = {}
    for name in ("src", "tgt"):
        value = normalize(getattr(pair, name))
        stripped = _strip_markup(value)
        if stripped != value:
            fixed = True
        segs[name] = " ".join(stripped.split())
    return replace(pair, **segs), fixed


def clean(corpus: Corpus, max_len_ratio: float = 5.0) -> tuple[Corpus, CleaningReport]:
    """Normalize and filter a corpus.

    Pipeline: strip square-bracket markup (both sides, counted once per
    pair in fixed_markup), collapse whitespace, then drop pairs that are
    empty on either side, exact (src, tgt) duplicates of an earlier
    pair, or token-length-ratio outliers (max/min strictly greater than
    max_len_ratio). Every removed pair lands in exactly one bucket, so
    kept + removed counts = len(corpus).
    """
    if max_len_ratio <= 0:
        raise DataError(f"max_len_ratio must be positive, got {max_len_ratio}")
    removed_empty = removed_dup = removed_ratio = fixed_markup = 0
    seen: set[tuple[str, str]] = set()
    kept_pairs = []
    for pair in corpus.pairs:
        pair, fixed = _normalize_pair(pair)
        if fixed:
            fixed_markup += 1
        if not pair.src or not pair.tgt:
            removed_empty += 1
            continue
        key = (pair.src, pair.tgt)
        if key in seen:
            removed_dup += 1
            continue
        n_src = len(tokenize(pair.src))
        n_tgt = len(tokenize(pair.tgt))
        if min(n_src, n_tgt) >= 1 and max(n_src, n_tgt) / min(n_src, n_tgt) > max_len_ratio:
            removed_ratio += 1
            continue
        seen.add(key)
        kept_pairs.append(pair)
    report = CleaningReport(
        removed_empty=removed_empty,
        removed_duplicates=removed_dup,
        removed_ratio_outliers=removed_ratio,
        fixed_markup=fixed_markup,
        kept=len(kept_pairs),
    )
    return Corpus(name=corpus.name, pairs=kept_pairs), report


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Partition into (train, test); both sides keep corpus order."""
    n = len(corpus.pairs)
    if spec.mode == "random_fraction":
        if n == 0:
            raise DataError("cannot split an empty corpus")
        k = int(round(n * spec.fraction))
        rng = random.Random(spec.seed)
        test_idx = set(rng.sample(range(n), k))
    else:
        held = set(spec.held_doc_ids)
        test_idx = {i for i, p in enumerate(corpus.pairs) if p.doc_id in held}
        if not test_idx:
            raise DataError(
                "held_out_doc split produced an empty test split; "
                f"no pair has doc_id in {sorted(held)}"
            )
    train = [p for i, p in enumerate(corpus.pairs) if i not in test_idx]
    test = [p for i, p in enumerate(corpus.pairs) if i in test_idx]
    return (
        Corpus(name=f"{corpus.name}/train", pairs=train),
        Corpus(name=f"{corpus.name}/test", pairs=test),
    )


def gen_context_targets(
    sentences: list[str], max_context: int = 5
) -> list[tuple[list[str], str]]:
    """Decompose sentences into (context, next-token) training examples.

    Every token position from the second onward becomes one example
    whose context is the up-to-max_context preceding tokens. Sentences
    with fewer than two tokens contribute nothing.
    """
    if max_context < 1:
        raise DataError(f"max_context must be >= 1, got {max_context}")
    out = []
    for sentence in sentences:
        toks = tokenize(sentence)
        for i in range(1, len(toks)):
            out.append((toks[max(0, i - max_context) : i], toks[i]))
    return out
