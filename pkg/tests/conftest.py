import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from writekit.lexicon import Gloss, Lexicon, LexiconEntry

REPO_ROOT = Path(__file__).resolve().parent.parent
TOY_DIR = REPO_ROOT / "data" / "toy"


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY_DIR


def make_lexicon(*entries) -> Lexicon:
    """Compact builder: each entry is (headword, freq) or a full dict."""
    out = []
    for e in entries:
        if isinstance(e, dict):
            glosses = [Gloss(**g) for g in e.pop("glosses", [])]
            out.append(LexiconEntry(glosses=glosses, **e))
        else:
            headword, freq = e
            out.append(LexiconEntry(headword=headword, freq=freq))
    return Lexicon(out)


@pytest.fixture
def small_lexicon() -> Lexicon:
    return make_lexicon(
        {"headword": "balo", "freq": 9, "glosses": [{"lang": "eng", "text": "house"}]},
        {"headword": "minu", "freq": 5, "glosses": [{"lang": "eng", "text": "river"}]},
        {"headword": "teka", "freq": 3, "glosses": [{"lang": "eng", "text": "sun"}]},
        {"headword": "tek", "freq": 2, "glosses": [{"lang": "eng", "text": "cliff"}]},
        ("balot", 1),
    )
