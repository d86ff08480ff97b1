"""Spell checking against a lexicon, with synthetic typo generation.

Real misspelling corpora do not exist for the languages this targets,
so the corrector is trained and evaluated on synthetic corruptions:
random single-character edits drawn from the lexicon's own alphabet.
Suggestion ranking is a noisy-channel score: a language-model prior
(lexicon unigram frequencies, or a fitted WordPredictor when given)
minus a per-edit penalty.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field

from .errors import DataError, FormatError
from .lexicon import Lexicon
from .metrics import chrf_sentence
from .tokenize import is_word_token, normalize, tokenize_with_spans

EDIT_OPS = ("substitute", "delete", "insert")


@dataclass(frozen=True)
class TypoModel:
    ops: tuple[str, ...] = EDIT_OPS
    alphabet: str = "abcdefghijklmnopqrstuvwxyz"

    def __post_init__(self):
        if not self.ops:
            raise DataError("typo model needs at least one edit op")
        bad = [op for op in self.ops if op not in EDIT_OPS]
        if bad:
            raise DataError(f"unknown edit ops {bad}; expected subset of {EDIT_OPS}")
        if not self.alphabet:
            raise DataError("typo model alphabet must be non-empty")

    @classmethod
    def from_lexicon(cls, lexicon: Lexicon, ops: tuple[str, ...] = EDIT_OPS) -> "TypoModel":
        chars = sorted({ch for e in lexicon.entries() for ch in e.headword})
        if not chars:
            raise DataError("lexicon has no headword characters")
        return cls(ops=ops, alphabet="".join(chars))


@dataclass(frozen=True)
class Edit:
    op: str
    pos: int
    char: str

    def to_dict(self) -> dict:
        return {"op": self.op, "pos": self.pos, "char": self.char}


def corrupt(
    word: str, n_edits: int, model: TypoModel, seed: int | random.Random = 0
) -> tuple[str, list[Edit]]:
    """Apply n_edits random edits at distinct positions of word.

    Positions refer to the original word. Edits are applied high
    position first so lower offsets stay valid; the returned log is in
    ascending position order. Requests that cannot be honored literally
    degrade to inserts: more edits than characters, deleting from an
    empty word, or substituting when the alphabet has no alternative
    character.
    """
    if n_edits < 1:
        raise DataError(f"n_edits must be >= 1, got {n_edits}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    word = normalize(word)
    n_in_place = min(n_edits, len(word))
    planned = [
        (pos, rng.choice(model.ops))
        for pos in sorted(rng.sample(range(len(word)), n_in_place))
    ]
    for _ in range(n_edits - n_in_place):
        planned.append((rng.randrange(len(word) + 1), "insert"))
    chars = list(word)
    edits = []
    for pos, op in sorted(planned, key=lambda item: -item[0]):
        if op == "substitute":
            choices = [c for c in model.alphabet if c != chars[pos]]
            if choices:
                new = rng.choice(choices)
                edits.append(Edit("substitute", pos, new))
                chars[pos] = new
                continue
            op = "insert"
        if op == "delete":
            removed = chars.pop(pos)
            edits.append(Edit("delete", pos, removed))
            continue
        new = rng.choice(model.alphabet)
        chars.insert(pos, new)
        edits.append(Edit("insert", pos, new))
    edits.sort(key=lambda e: e.pos)
    return "".join(chars), edits


@dataclass(frozen=True)
class TypoPair:
    incorrect: str
    correct: str
    edits: list[Edit] = field(default_factory=list)

    @property
    def skipped(self) -> bool:
        """True for sentences passed through because nothing was editable."""
        return not self.edits

    def to_dict(self) -> dict:
        return {
            "incorrect": self.incorrect,
            "correct": self.correct,
            "edits": [e.to_dict() for e in self.edits],
        }


def gen_typo_pairs(
    sentences: list[str], model: TypoModel, seed: int = 0
) -> list[TypoPair]:
    """One single-edit corruption per sentence, seeded and repeatable.

    One alphabetic token is chosen uniformly per sentence and corrupted
    with a single edit. Sentences without any alphabetic token pass
    through unchanged with an empty edit log.
    """
    rng = random.Random(seed)
    pairs = []
    for sentence in sentences:
        spans = tokenize_with_spans(sentence)
        correct = normalize(sentence)
        word_spans = [(tok, s, e) for tok, s, e in spans if is_word_token(tok)]
        if not word_spans:
            pairs.append(TypoPair(incorrect=correct, correct=correct, edits=[]))
            continue
        tok, start, end = rng.choice(word_spans)
        bad, edits = corrupt(tok, 1, model, rng)
        # re-anchor edit positions from token offsets to sentence offsets
        edits = [Edit(e.op, e.pos + start, e.char) for e in edits]
        pairs.append(
            TypoPair(incorrect=correct[:start] + bad + correct[end:], correct=correct, edits=edits)
        )
    return pairs


def save_typo_pairs(pairs: list[TypoPair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_dict(), ensure_ascii=False) + "\n")


def load_typo_pairs(path) -> list[TypoPair]:
    pairs = []
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
            if "incorrect" not in obj or "correct" not in obj:
                raise FormatError(
                    "typo pair must have 'incorrect' and 'correct'",
                    line=lineno,
                    path=str(path),
                )
            edits = [
                Edit(op=e["op"], pos=e["pos"], char=e["char"])
                for e in obj.get("edits", [])
            ]
            pairs.append(TypoPair(obj["incorrect"], obj["correct"], edits))
    return pairs


# ---- checking and suggesting ---------------------------------------------


def check_word(word: str, lexicon: Lexicon) -> bool:
    """Exact headword membership after NFC normalization."""
    if not word:
        return False
    return word in lexicon


@dataclass(frozen=True)
class Correction:
    token: str
    score: float
    dist: int

    def to_dict(self) -> dict:
        return {"token": self.token, "score": self.score, "dist": self.dist}


def suggest(
    word: str,
    lexicon: Lexicon,
    lm=None,
    context: list[str] | None = None,
    max_dist: int = 2,
    k: int = 5,
    edit_penalty: float = 4.0,
) -> list[Correction]:
    """Ranked corrections within max_dist edits of word.

    score = prior(candidate) - dist * edit_penalty, where the prior is
    the add-one-smoothed lexicon unigram log probability, or the fitted
    word predictor's log score of context + candidate when lm is given.
    An exact headword match always lands at rank 1; the rest order by
    (score desc, dist asc, headword asc).
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    if edit_penalty < 0:
        raise DataError(f"edit_penalty must be >= 0, got {edit_penalty}")
    candidates = lexicon.lookup_approx(word, max_dist=max_dist, k=max(len(lexicon), 1))
    total_freq = lexicon.total_freq()
    v = len(lexicon)
    scored = []
    for entry, dist in candidates:
        if lm is not None:
            prior = lm.log_score((context or []) + [entry.headword])
        else:
            prior = math.log((entry.freq + 1) / (total_freq + v))
        scored.append(Correction(entry.headword, prior - dist * edit_penalty, dist))
    exact = [c for c in scored if c.dist == 0]
    rest = sorted(
        (c for c in scored if c.dist > 0),
        key=lambda c: (-c.score, c.dist, c.token),
    )
    return (exact + rest)[:k]


@dataclass(frozen=True)
class SpellFlag:
    token: str
    start: int
    end: int
    suggestions: list[Correction]

    def to_dict(self) -> dict:
        return {
            "token": self.token,
            "start": self.start,
            "end": self.end,
            "suggestions": [c.to_dict() for c in self.suggestions],
        }


def check_sentence(
    sentence: str,
    lexicon: Lexicon,
    lm=None,
    max_dist: int = 2,
    k: int = 5,
    edit_penalty: float = 4.0,
) -> list[SpellFlag]:
    """Flag out-of-lexicon alphabetic tokens with ranked corrections.

    Spans are character offsets into the NFC-normalized sentence.
    Punctuation and number-only tokens are never flagged. When an lm is
    given, each flag's suggestions are scored in the context of all
    preceding tokens.
    """
    flags = []
    seen_tokens: list[str] = []
    for tok, start, end in tokenize_with_spans(sentence):
        if is_word_token(tok) and not check_word(tok, lexicon):
            flags.append(
                SpellFlag(
                    token=tok,
                    start=start,
                    end=end,
                    suggestions=suggest(
                        tok,
                        lexicon,
                        lm=lm,
                        context=list(seen_tokens) if lm is not None else None,
                        max_dist=max_dist,
                        k=k,
                        edit_penalty=edit_penalty,
                    ),
                )
            )
        seen_tokens.append(tok)
    return flags


def _apply_corrections(text: str, flags: list[SpellFlag], choices: list[int]) -> str:
    for flag, choice in sorted(zip(flags, choices), key=lambda fc: -fc[0].start):
        if not flag.suggestions:
            continue
        pick = flag.suggestions[min(choice, len(flag.suggestions) - 1)]
        text = text[: flag.start] + pick.token + text[flag.end :]
    return text


@dataclass(frozen=True)
class CorrectionReport:
    n: int
    accuracy_top1: float
    accuracy_top3: float
    chrf_mean: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy_top1": self.accuracy_top1,
            "accuracy_top3": self.accuracy_top3,
            "chrf_mean": self.chrf_mean,
        }


def evaluate_corrector(
    pairs: list[TypoPair],
    lexicon: Lexicon,
    lm=None,
    max_dist: int = 2,
    edit_penalty: float = 4.0,
) -> CorrectionReport:
    """Sentence-exact correction accuracy over (incorrect, correct) pairs.

    accuracy_top1 applies every flag's rank-1 suggestion; accuracy_top3
    counts a pair as correct when any combination of top-3 choices
    reproduces the reference (combination search capped at 1000, then
    per-flag greedy). chrf_mean scores the top-1 corrections against
    the references.
    """
    if not pairs:
        raise DataError("no typo pairs to evaluate")
    top1_hits = 0
    top3_hits = 0
    chrf_sum = 0.0
    for pair in pairs:
        correct = normalize(pair.correct)
        if not correct.strip():
            raise DataError("typo pair with empty correct side")
        flags = check_sentence(
            pair.incorrect, lexicon, lm=lm, max_dist=max_dist, k=3,
            edit_penalty=edit_penalty,
        )
        top1 = _apply_corrections(normalize(pair.incorrect), flags, [0] * len(flags))
        if top1 == correct:
            top1_hits += 1
            top3_hits += 1
        else:
            option_counts = [max(len(f.suggestions), 1) for f in flags]
            n_combos = math.prod(option_counts)
            if 1 < n_combos <= 1000:
                hit = any(
                    _apply_corrections(normalize(pair.incorrect), flags, list(combo)) == correct
                    for combo in itertools.product(*(range(c) for c in option_counts))
                )
            else:
                # too many combos: coordinate-wise greedy on the choice vector
                choices = [0] * len(flags)
                for i in range(len(flags)):
                    choices[i] = max(
                        range(option_counts[i]),
                        key=lambda j: chrf_sentence(
                            _apply_corrections(
                                normalize(pair.incorrect),
                                flags,
                                choices[:i] + [j] + choices[i + 1 :],
                            ),
                            correct,
                        ),
                    )
                hit = _apply_corrections(normalize(pair.incorrect), flags, choices) == correct
            if hit:
                top3_hits += 1
        chrf_sum += chrf_sentence(top1, correct)
    n = len(pairs)
    return CorrectionReport(
        n=n,
        accuracy_top1=top1_hits / n,
        accuracy_top3=top3_hits / n,
        chrf_mean=chrf_sum / n,
    )
