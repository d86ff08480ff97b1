"""Language identification for crawl filtering and routing.

Multinomial naive Bayes over lowercased word unigrams and character
trigrams, trained in one closed-form counting pass. Inference is
open-set: when the winning posterior is below the rejection threshold
the text is labeled "und" (undetermined) instead of being forced into
a known class. Features never seen in training are ignored, so text in
a completely unseen language degrades to the class priors and gets
rejected at any threshold above the largest prior.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

from .base import ParamsMixin
from .errors import DataError, FormatError
from .tokenize import is_word_token, tokenize

UNKNOWN = "und"

FORMAT_NAME = "writekit-langid"
FORMAT_VERSION = 1


def _features(text: str, char_n: int) -> Counter:
    words = [t for t in tokenize(text.lower()) if is_word_token(t)]
    feats: Counter = Counter(("w", w) for w in words)
    stream = " ".join(words)
    for i in range(len(stream) - char_n + 1):
        feats[("c", stream[i : i + char_n])] += 1
    return feats


@dataclass(frozen=True)
class Identification:
    lang: str
    confidence: float
    posteriors: dict

    def to_dict(self) -> dict:
        return {
            "lang": self.lang,
            "confidence": self.confidence,
            "posteriors": self.posteriors,
        }


class LanguageIdentifier(ParamsMixin):
    """NB classifier with a fit/predict surface and open-set rejection.

    Learned state: classes_, class_counts_ (training samples per
    class), feature_counts_ (per-class feature counters), totals_,
    vocab_.
    """

    def __init__(self, rejection_threshold: float = 0.5, char_n: int = 3):
        self.rejection_threshold = rejection_threshold
        self.char_n = char_n
        self.classes_ = None
        self.class_counts_ = None
        self.feature_counts_ = None
        self.totals_ = None
        self.vocab_ = None

    def fit(self, texts: list[str], labels: list[str]):
        if not 0.0 <= self.rejection_threshold <= 1.0:
            raise DataError(
                f"rejection_threshold must be in [0, 1], got {self.rejection_threshold}"
            )
        if self.char_n < 2:
            raise DataError(f"char_n must be >= 2, got {self.char_n}")
        if len(texts) != len(labels):
            raise DataError(
                f"texts/labels length mismatch: {len(texts)} vs {len(labels)}"
            )
        if not texts:
            raise DataError("empty training data")
        classes = sorted(set(labels))
        if len(classes) < 2:
            raise DataError("need at least two language classes to train")
        if UNKNOWN in classes:
            raise DataError(f"{UNKNOWN!r} is reserved for rejection")
        class_counts = Counter(labels)
        feature_counts = {c: Counter() for c in classes}
        for text, label in zip(texts, labels):
            feature_counts[label].update(_features(text, self.char_n))
        self.classes_ = classes
        self.class_counts_ = dict(class_counts)
        self.feature_counts_ = feature_counts
        self.totals_ = {c: sum(fc.values()) for c, fc in feature_counts.items()}
        self.vocab_ = set().union(*feature_counts.values())
        return self

    def posteriors(self, text: str) -> dict[str, float]:
        """Per-class posterior probabilities; sums to 1 for known-feature text."""
        self._check_fitted("classes_", "feature_counts_")
        feats = _features(text, self.char_n)
        n_samples = sum(self.class_counts_.values())
        v = len(self.vocab_)
        log_posts = {}
        for c in self.classes_:
            lp = math.log(self.class_counts_[c] / n_samples)
            fc = self.feature_counts_[c]
            denom = self.totals_[c] + v
            for feat, count in feats.items():
                if feat in self.vocab_:
                    lp += count * math.log((fc.get(feat, 0) + 1) / denom)
            log_posts[c] = lp
        peak = max(log_posts.values())
        expd = {c: math.exp(lp - peak) for c, lp in log_posts.items()}
        z = sum(expd.values())
        return {c: e / z for c, e in expd.items()}

    def identify(self, text: str) -> Identification:
        """Best class, or "und" when confidence falls below the threshold."""
        self._check_fitted("classes_", "feature_counts_")
        if not text or not text.strip():
            return Identification(lang=UNKNOWN, confidence=0.0, posteriors={})
        posts = self.posteriors(text)
        best = min(posts, key=lambda c: (-posts[c], c))
        confidence = posts[best]
        lang = best if confidence >= self.rejection_threshold else UNKNOWN
        return Identification(lang=lang, confidence=confidence, posteriors=posts)

    def predict(self, texts: list[str]) -> list[str]:
        return [self.identify(t).lang for t in texts]

    def predict_proba(self, texts: list[str]) -> list[dict]:
        return [self.posteriors(t) for t in texts]

    # ---- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        self._check_fitted("classes_", "feature_counts_")
        word_counts = {}
        char_counts = {}
        for c in self.classes_:
            word_counts[c] = {
                feat[1]: cnt
                for feat, cnt in sorted(self.feature_counts_[c].items())
                if feat[0] == "w"
            }
            char_counts[c] = {
                feat[1]: cnt
                for feat, cnt in sorted(self.feature_counts_[c].items())
                if feat[0] == "c"
            }
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "rejection_threshold": self.rejection_threshold,
            "char_n": self.char_n,
            "classes": self.classes_,
            "class_counts": self.class_counts_,
            "word_counts": word_counts,
            "char_counts": char_counts,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "LanguageIdentifier":
        if obj.get("format") != FORMAT_NAME:
            raise FormatError(f"not a {FORMAT_NAME} model: format={obj.get('format')!r}")
        if obj.get("version") != FORMAT_VERSION:
            raise FormatError(f"unsupported model version {obj.get('version')!r}")
        model = cls(
            rejection_threshold=obj["rejection_threshold"], char_n=obj["char_n"]
        )
        model.classes_ = list(obj["classes"])
        model.class_counts_ = {c: int(n) for c, n in obj["class_counts"].items()}
        model.feature_counts_ = {
            c: Counter(
                {("w", f): cnt for f, cnt in obj["word_counts"].get(c, {}).items()}
            )
            + Counter(
                {("c", f): cnt for f, cnt in obj["char_counts"].get(c, {}).items()}
            )
            for c in model.classes_
        }
        model.totals_ = {c: sum(fc.values()) for c, fc in model.feature_counts_.items()}
        model.vocab_ = set().union(*model.feature_counts_.values())
        return model

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "LanguageIdentifier":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid model JSON ({exc.msg})", path=str(path)) from exc
        return cls.from_dict(obj)


@dataclass(frozen=True)
class LangIdReport:
    n: int
    accuracy: float
    per_class_recall: dict
    confusion: dict
    unknown_rate: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "per_class_recall": self.per_class_recall,
            "confusion": self.confusion,
            "unknown_rate": self.unknown_rate,
        }


def evaluate_langid(
    model: LanguageIdentifier, labeled: list[tuple[str, str]]
) -> LangIdReport:
    """Accuracy, per-class recall, confusion, and rejection rate.

    Items whose true label is outside the model's classes count as
    correct iff the model rejects them as "und".
    """
    if not labeled:
        raise DataError("no labeled samples to evaluate")
    known = set(model.classes_ or ())
    correct = 0
    unknowns = 0
    confusion: dict[str, dict[str, int]] = {}
    class_totals: Counter = Counter()
    class_hits: Counter = Counter()
    for text, label in labeled:
        pred = model.identify(text).lang
        if pred == UNKNOWN:
            unknowns += 1
        row = confusion.setdefault(label, {})
        row[pred] = row.get(pred, 0) + 1
        if label in known:
            class_totals[label] += 1
            if pred == label:
                class_hits[label] += 1
                correct += 1
        elif pred == UNKNOWN:
            correct += 1
    recall = {
        c: (class_hits[c] / class_totals[c] if class_totals[c] else None)
        for c in sorted(known)
    }
    n = len(labeled)
    return LangIdReport(
        n=n,
        accuracy=correct / n,
        per_class_recall=recall,
        confusion=confusion,
        unknown_rate=unknowns / n,
    )
