"""Writing-assistant toolkit for languages with very small corpora.

Corpus handling, dictionary lookup, next-word prediction, spell
checking, language identification, translation metrics with
memorization/contamination diagnostics, pluggable translators, and an
HTTP service tying the pieces together for editor frontends.
"""

from .corpus import (
    CleaningReport,
    Corpus,
    SentencePair,
    SplitSpec,
    clean,
    gen_context_targets,
    ingest,
    save,
    split,
)
from .errors import (
    ConfigError,
    DataError,
    FormatError,
    NotFittedError,
    TranslationError,
    WritekitError,
)
from .langid import UNKNOWN, Identification, LanguageIdentifier, evaluate_langid
from .lexicon import (
    Gloss,
    Lexicon,
    LexiconEntry,
    levenshtein,
    load_lexicon,
    save_lexicon,
    with_corpus_frequencies,
)
from .metrics import (
    ContaminationReport,
    DistributionDiagnostic,
    ScoreReport,
    UsefulnessReport,
    bleu_sentence,
    chrf_sentence,
    contamination_scan,
    memorization_diagnostic,
    score_corpus,
    usefulness_histogram,
)
from .predict import Suggestion, WordPredictor
from .spell import (
    Correction,
    CorrectionReport,
    SpellFlag,
    TypoModel,
    TypoPair,
    check_sentence,
    check_word,
    corrupt,
    evaluate_corrector,
    gen_typo_pairs,
    suggest,
)
from .tokenize import is_word_token, normalize, tokenize, tokenize_with_spans
from .translate import TranslationResult, Translator, TranslatorSpec

__version__ = "0.1.0"
