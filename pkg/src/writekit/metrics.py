"""Segment-level translation metrics and training-diagnostic scans.

BLEU here is the segment-level variant: clipped n-gram precisions up to
max_n, exp/NIST smoothing (the k-th zero-match order contributes
1/(2^k * total)), orders the candidate is too short to populate are
skipped, geometric mean, brevity penalty against the closest reference
length (ties toward the shorter reference). chrF keeps single spaces in
the character stream (runs collapsed, ends stripped) and averages
precision/recall over orders where both sides have n-grams before the
F_beta combination. Both return 0..100 and score identity pairs at
exactly 100.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import DataError, FormatError
from .tokenize import normalize, tokenize


def _token_ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_sentence(candidate: str, references: list[str], max_n: int = 4) -> float:
    if not 1 <= max_n <= 9:
        raise DataError(f"max_n must be in [1, 9], got {max_n}")
    if not references:
        raise DataError("at least one reference is required")
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references]
    c = len(cand)
    if c == 0:
        return 0.0
    r = min((len(ref) for ref in refs), key=lambda rl: (abs(rl - c), rl))
    log_sum = 0.0
    orders = 0
    zeros = 0
    for n in range(1, max_n + 1):
        cand_counts = _token_ngrams(cand, n)
        total = sum(cand_counts.values())
        if total == 0:
            continue
        clip: Counter = Counter()
        for ref in refs:
            ref_counts = _token_ngrams(ref, n)
            for gram in cand_counts:
                clip[gram] = max(clip[gram], ref_counts.get(gram, 0))
        matches = sum(min(cnt, clip[gram]) for gram, cnt in cand_counts.items())
        if matches == 0:
            zeros += 1
            precision = 1.0 / (2**zeros * total)
        else:
            precision = matches / total
        log_sum += math.log(precision)
        orders += 1
    if orders == 0:
        return 0.0
    geo_mean = math.exp(log_sum / orders)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return 100.0 * brevity * geo_mean


def _char_stream(text: str) -> str:
    return " ".join(normalize(text).split())


def chrf_sentence(candidate: str, reference: str, char_n: int = 6, beta: float = 2.0) -> float:
    if char_n < 1:
        raise DataError(f"char_n must be >= 1, got {char_n}")
    if beta <= 0:
        raise DataError(f"beta must be positive, got {beta}")
    ref = _char_stream(reference)
    if not ref:
        raise DataError("reference must be non-empty")
    cand = _char_stream(candidate)
    if not cand:
        return 0.0
    precisions = []
    recalls = []
    for n in range(1, char_n + 1):
        cand_counts = Counter(cand[i : i + n] for i in range(len(cand) - n + 1))
        ref_counts = Counter(ref[i : i + n] for i in range(len(ref) - n + 1))
        cand_total = sum(cand_counts.values())
        ref_total = sum(ref_counts.values())
        if cand_total == 0 or ref_total == 0:
            continue
        overlap = sum(min(cnt, ref_counts.get(g, 0)) for g, cnt in cand_counts.items())
        precisions.append(overlap / cand_total)
        recalls.append(overlap / ref_total)
    if not precisions:
        return 0.0
    avg_p = sum(precisions) / len(precisions)
    avg_r = sum(recalls) / len(recalls)
    if avg_p + avg_r == 0.0:
        return 0.0
    b2 = beta * beta
    return 100.0 * (1 + b2) * avg_p * avg_r / (b2 * avg_p + avg_r)


@dataclass(frozen=True)
class ScoreReport:
    metric: str
    params: dict
    scores: list[float]
    mean: float
    std: float

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "params": self.params,
            "segments": len(self.scores),
            "mean": self.mean,
            "std": self.std,
            "scores": self.scores,
        }


def score_corpus(
    metric: str, candidates: list[str], references: list[str], **params
) -> ScoreReport:
    """Segment scores plus mean and population standard deviation."""
    if metric not in ("bleu", "chrf"):
        raise DataError(f"unknown metric {metric!r}; expected 'bleu' or 'chrf'")
    if len(candidates) != len(references):
        raise DataError(
            f"candidate/reference length mismatch: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise DataError("no segments to score")
    if metric == "bleu":
        max_n = params.pop("max_n", 4)
        if params:
            raise DataError(f"unknown bleu params: {sorted(params)}")
        scores = [bleu_sentence(c, [r], max_n=max_n) for c, r in zip(candidates, references)]
        used = {"max_n": max_n, "smoothing": "exp"}
    else:
        char_n = params.pop("char_n", 6)
        beta = params.pop("beta", 2.0)
        if params:
            raise DataError(f"unknown chrf params: {sorted(params)}")
        scores = [
            chrf_sentence(c, r, char_n=char_n, beta=beta)
            for c, r in zip(candidates, references)
        ]
        used = {"char_n": char_n, "beta": beta}
    mean = sum(scores) / len(scores)
    std = math.sqrt(sum((s - mean) ** 2 for s in scores) / len(scores))
    return ScoreReport(metric=metric, params=used, scores=scores, mean=mean, std=std)


# ---- memorization diagnostic -------------------------------------------

PERFECT_CUTOFF = 99.5
HIGH_TAIL_CUTOFF = 95.0


@dataclass(frozen=True)
class DistributionDiagnostic:
    n: int
    perfect_fraction: float
    high_tail_fraction: float
    skewness: float
    bimodality_coefficient: float
    memorization_flag: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "perfect_fraction": self.perfect_fraction,
            "high_tail_fraction": self.high_tail_fraction,
            "skewness": self.skewness,
            "bimodality_coefficient": self.bimodality_coefficient,
            "memorization_flag": self.memorization_flag,
        }


def memorization_diagnostic(
    scores: list[float],
    perfect_threshold: float = 0.15,
    high_tail_threshold: float = 0.10,
    bimodality_threshold: float = 5.0 / 9.0,
) -> DistributionDiagnostic:
    """Shape diagnostic over per-segment train scores.

    A healthy small-data system produces a skewed unimodal score
    distribution; a spike of perfect scores or a bimodal shape with a
    heavy high tail is the signature of training-set regurgitation, so
    those are what get flagged.
    """
    n = len(scores)
    if n < 30:
        raise DataError(f"insufficient samples: need at least 30 scores, got {n}")
    bad = [s for s in scores if not 0.0 <= s <= 100.0]
    if bad:
        raise DataError(f"scores must be in [0, 100]; got {bad[0]!r}")
    perfect = sum(1 for s in scores if s >= PERFECT_CUTOFF) / n
    high_tail = sum(1 for s in scores if s >= HIGH_TAIL_CUTOFF) / n
    mean = sum(scores) / n
    m2 = sum((s - mean) ** 2 for s in scores) / n
    if m2 < 1e-12:
        skew = 0.0
        bc = 0.0
    else:
        m3 = sum((s - mean) ** 3 for s in scores) / n
        m4 = sum((s - mean) ** 4 for s in scores) / n
        g1 = m3 / m2**1.5
        skew = g1 * math.sqrt(n * (n - 1)) / (n - 2)
        g2 = m4 / (m2 * m2) - 3.0
        kurt_excess = ((n + 1) * g2 + 6.0) * (n - 1) / ((n - 2) * (n - 3))
        bc = (skew * skew + 1.0) / (
            kurt_excess + 3.0 * (n - 1) ** 2 / ((n - 2) * (n - 3))
        )
    flag = perfect >= perfect_threshold or (
        bc > bimodality_threshold and high_tail >= high_tail_threshold
    )
    return DistributionDiagnostic(
        n=n,
        perfect_fraction=perfect,
        high_tail_fraction=high_tail,
        skewness=skew,
        bimodality_coefficient=bc,
        memorization_flag=flag,
    )


# ---- contamination scan -------------------------------------------------


@dataclass(frozen=True)
class ContaminationRecord:
    index: int
    flagged: bool
    matched_keywords: list[str]
    matched_ngrams: list[str]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "flagged": self.flagged,
            "matched_keywords": self.matched_keywords,
            "matched_ngrams": self.matched_ngrams,
        }


@dataclass(frozen=True)
class ContaminationReport:
    records: list[ContaminationRecord]
    flagged_fraction: float
    ngram_len: int
    keywords: list[str]

    def flagged_indices(self) -> list[int]:
        return [r.index for r in self.records if r.flagged]

    def to_dict(self) -> dict:
        return {
            "n": len(self.records),
            "flagged_fraction": self.flagged_fraction,
            "ngram_len": self.ngram_len,
            "keywords": self.keywords,
            "records": [r.to_dict() for r in self.records],
        }


def contamination_scan(
    outputs: list[str],
    toxic_corpus: list[str],
    clean_corpus: list[str],
    keywords: list[str],
    ngram_len: int = 4,
) -> ContaminationReport:
    """Flag outputs that echo out-of-domain training text.

    An output is flagged when it contains a keyword as a whole token
    (case-insensitive) or any token n-gram that occurs in the toxic
    corpus but never in the clean corpus. Token comparison for n-grams
    is case-sensitive.
    """
    if ngram_len < 2:
        raise DataError(f"ngram_len must be >= 2, got {ngram_len}")
    toxic_grams: set[tuple[str, ...]] = set()
    for s in toxic_corpus:
        toxic_grams.update(_token_ngrams(tokenize(s), ngram_len))
    clean_grams: set[tuple[str, ...]] = set()
    for s in clean_corpus:
        clean_grams.update(_token_ngrams(tokenize(s), ngram_len))
    distinctive = toxic_grams - clean_grams
    folded = {kw.casefold(): kw for kw in keywords}
    records = []
    for i, out in enumerate(outputs):
        toks = tokenize(out)
        kw_hits = []
        for tok in toks:
            kw = folded.get(tok.casefold())
            if kw is not None and kw not in kw_hits:
                kw_hits.append(kw)
        gram_hits = []
        for j in range(len(toks) - ngram_len + 1):
            gram = tuple(toks[j : j + ngram_len])
            if gram in distinctive:
                joined = " ".join(gram)
                if joined not in gram_hits:
                    gram_hits.append(joined)
        records.append(
            ContaminationRecord(
                index=i,
                flagged=bool(kw_hits or gram_hits),
                matched_keywords=kw_hits,
                matched_ngrams=gram_hits,
            )
        )
    flagged_fraction = (
        sum(1 for r in records if r.flagged) / len(records) if records else 0.0
    )
    return ContaminationReport(
        records=records,
        flagged_fraction=flagged_fraction,
        ngram_len=ngram_len,
        keywords=list(keywords),
    )


# ---- usefulness ratings ---------------------------------------------------

# Fixed seven-point scale, best to worst; ordinal values 7..1.
USEFULNESS_LABELS = (
    "near-perfect",
    "correct",
    "mostly-correct",
    "usable",
    "mostly-incorrect",
    "incorrect",
    "very-wrong",
)
USEFULNESS_ORDINALS = {label: 7 - i for i, label in enumerate(USEFULNESS_LABELS)}


@dataclass(frozen=True)
class Rating:
    index: int
    label: str
    rater: str = ""
    note: str = ""


@dataclass(frozen=True)
class UsefulnessReport:
    n: int
    counts: dict = field(default_factory=dict)
    fractions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "counts": self.counts, "fractions": self.fractions}


def usefulness_histogram(labels: list[str]) -> UsefulnessReport:
    """Counts and fractions per scale label, best-to-worst order."""
    counts = {label: 0 for label in USEFULNESS_LABELS}
    for label in labels:
        if label not in counts:
            raise DataError(
                f"unknown usefulness label {label!r}; expected one of {list(USEFULNESS_LABELS)}"
            )
        counts[label] += 1
    n = len(labels)
    fractions = {label: (c / n if n else 0.0) for label, c in counts.items()}
    return UsefulnessReport(n=n, counts=counts, fractions=fractions)


def load_ratings(path) -> list[Rating]:
    """Read a JSONL ratings file ({index, label, rater, note} per line)."""
    ratings = []
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
            if not isinstance(obj, dict) or "index" not in obj or "label" not in obj:
                raise FormatError(
                    "rating must have 'index' and 'label'", line=lineno, path=str(path)
                )
            if not isinstance(obj["index"], int) or obj["index"] < 0:
                raise FormatError(
                    f"index must be a non-negative integer, got {obj['index']!r}",
                    line=lineno,
                    path=str(path),
                )
            if obj["label"] not in USEFULNESS_ORDINALS:
                raise FormatError(
                    f"unknown usefulness label {obj['label']!r}",
                    line=lineno,
                    path=str(path),
                )
            ratings.append(
                Rating(
                    index=obj["index"],
                    label=obj["label"],
                    rater=obj.get("rater", ""),
                    note=obj.get("note", ""),
                )
            )
    return ratings
