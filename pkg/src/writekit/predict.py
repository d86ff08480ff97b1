"""Next-word prediction from raw counts with stupid backoff.

Training decomposes every sentence into (context, next-token) examples
and keeps raw counts for every context suffix length up to max_context;
the length-0 level holds unigram counts of every token. Prediction
walks suffixes longest-first and the first level that has successors
wins outright; there are no interpolation weights. Counts, not
probabilities, are stored, so models serialize losslessly as JSON.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .base import ParamsMixin
from .corpus import gen_context_targets
from .errors import DataError, FormatError
from .tokenize import tokenize

FORMAT_NAME = "writekit-ngram"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Suggestion:
    token: str
    score: float
    context_len: int

    def to_dict(self) -> dict:
        return {
            "token": self.token,
            "score": self.score,
            "context_len": self.context_len,
        }


class WordPredictor(ParamsMixin):
    """Backoff n-gram model with a fit/predict surface.

    Learned state (set by fit or load): counts_, unigrams_, vocab_,
    total_tokens_.
    """

    def __init__(self, max_context: int = 5):
        self.max_context = max_context
        self.counts_ = None
        self.unigrams_ = None
        self.vocab_ = None
        self.total_tokens_ = None

    def fit(self, sentences: list[str]):
        if not 1 <= self.max_context <= 5:
            raise DataError(
                f"max_context must be in [1, 5], got {self.max_context}"
            )
        if not sentences:
            raise DataError("empty training data")
        unigrams: Counter[str] = Counter()
        for sentence in sentences:
            unigrams.update(tokenize(sentence))
        if not unigrams:
            raise DataError("training data contains no tokens")
        counts: dict[tuple[str, ...], Counter] = {}
        for context, target in gen_context_targets(sentences, self.max_context):
            for length in range(1, len(context) + 1):
                key = tuple(context[-length:])
                if key not in counts:
                    counts[key] = Counter()
                counts[key][target] += 1
        self.counts_ = counts
        self.unigrams_ = unigrams
        self.vocab_ = set(unigrams)
        self.total_tokens_ = sum(unigrams.values())
        return self

    # ---- prediction ----------------------------------------------------

    def _level_for(self, ctx_tokens: list[str]) -> tuple[Counter, int]:
        """Longest context suffix with successors; unigram floor at 0."""
        for length in range(min(len(ctx_tokens), self.max_context), 0, -1):
            table = self.counts_.get(tuple(ctx_tokens[-length:]))
            if table:
                return table, length
        return self.unigrams_, 0

    def suggest(
        self, context: str, k: int = 5, user_counts: dict[str, int] | None = None
    ) -> list[Suggestion]:
        """Top-k next tokens for a raw-text context.

        Ties rank lexicographically. With a per-user overlay the overlay
        counts are added to the chosen level's counts before ranking
        (new tokens may enter); scores stay a distribution over the
        effective successor set.
        """
        self._check_fitted("counts_", "unigrams_")
        if k < 1:
            raise DataError(f"k must be >= 1, got {k}")
        table, level = self._level_for(tokenize(context))
        if user_counts:
            table = Counter(table)
            for tok, c in user_counts.items():
                if c < 0:
                    raise DataError("user count overlay must be non-negative")
                table[tok] += c
        total = sum(table.values())
        ranked = sorted(table.items(), key=lambda item: (-item[1], item[0]))
        return [
            Suggestion(token=tok, score=cnt / total, context_len=level)
            for tok, cnt in ranked[:k]
        ]

    def predict(self, contexts: list[str]) -> list[str]:
        """Top-1 next token per context."""
        return [self.suggest(ctx, k=1)[0].token for ctx in contexts]

    def log_score(self, tokens: list[str]) -> float:
        """Sum of per-token log backoff probabilities.

        Each position uses the longest context suffix where the target
        was actually seen (raw MLE there); targets unseen at every level
        fall to the add-one-smoothed unigram floor (n+1)/(N+V), so the
        result is finite for any token sequence.
        """
        self._check_fitted("counts_", "unigrams_")
        if not tokens:
            raise DataError("empty token sequence")
        import math

        total = 0.0
        v = len(self.vocab_)
        n_tokens = self.total_tokens_
        for i, target in enumerate(tokens):
            context = tokens[max(0, i - self.max_context) : i]
            prob = None
            for length in range(len(context), 0, -1):
                table = self.counts_.get(tuple(context[-length:]))
                if table and table.get(target, 0) > 0:
                    prob = table[target] / sum(table.values())
                    break
            if prob is None:
                prob = (self.unigrams_.get(target, 0) + 1) / (n_tokens + v)
            total += math.log(prob)
        return total

    # ---- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        self._check_fitted("counts_", "unigrams_")
        contexts = [
            [list(ctx), sorted(table.items())]
            for ctx, table in sorted(self.counts_.items())
        ]
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "max_context": self.max_context,
            "unigrams": sorted(self.unigrams_.items()),
            "contexts": contexts,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "WordPredictor":
        if obj.get("format") != FORMAT_NAME:
            raise FormatError(f"not a {FORMAT_NAME} model: format={obj.get('format')!r}")
        if obj.get("version") != FORMAT_VERSION:
            raise FormatError(f"unsupported model version {obj.get('version')!r}")
        model = cls(max_context=obj["max_context"])
        model.unigrams_ = Counter(dict((t, c) for t, c in obj["unigrams"]))
        model.counts_ = {
            tuple(ctx): Counter(dict((t, c) for t, c in table))
            for ctx, table in obj["contexts"]
        }
        model.vocab_ = set(model.unigrams_)
        model.total_tokens_ = sum(model.unigrams_.values())
        return model

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "WordPredictor":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid model JSON ({exc.msg})", path=str(path)) from exc
        return cls.from_dict(obj)
