import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from conftest import make_lexicon
from writekit.errors import (
    ConfigError,
    DataError,
    TranslationError,
    TranslationHTTPError,
    TranslationTimeout,
)
from writekit.lexicon import Gloss, LexiconEntry, Lexicon
from writekit.translate import BACKENDS, TranslationResult, Translator, TranslatorSpec


# ---- TranslatorSpec validation ----------------------------------------------------


def test_backend_names():
    assert BACKENDS == ("echo", "glossary", "remote")


def test_spec_validation():
    with pytest.raises(ConfigError):
        TranslatorSpec(backend="babelfish", direction=("a", "b"))
    with pytest.raises(ConfigError):
        TranslatorSpec(backend="echo", direction=("a", "a"))
    with pytest.raises(ConfigError):
        TranslatorSpec(backend="echo", direction=("a", ""))
    with pytest.raises(ConfigError):
        TranslatorSpec(backend="remote", direction=("a", "b"))
    with pytest.raises(ConfigError):
        TranslatorSpec(backend="echo", direction=("a", "b"), timeout=0)
    with pytest.raises(ConfigError):
        TranslatorSpec(backend="echo", direction=("a", "b"), cache_ttl=-1)


def test_glossary_requires_lexicon():
    spec = TranslatorSpec(backend="glossary", direction=("toy", "eng"))
    with pytest.raises(ConfigError):
        Translator(spec)


# ---- echo backend -----------------------------------------------------------------


def test_echo_returns_input():
    t = Translator(TranslatorSpec(backend="echo", direction=("toy", "eng")))
    result = t.translate("balo minu")
    assert result.text == "balo minu"
    assert result.unknown_tokens == []
    assert result.backend == "echo"
    assert result.direction == ("toy", "eng")
    assert result.from_cache is False
    assert result.latency >= 0.0


def test_empty_text_rejected():
    t = Translator(TranslatorSpec(backend="echo", direction=("toy", "eng")))
    with pytest.raises(DataError):
        t.translate("")
    with pytest.raises(DataError):
        t.translate("   ")


def test_result_to_dict():
    d = TranslationResult("x", [], "echo", ("a", "b"), 0.01, True).to_dict()
    assert d["direction"] == ["a", "b"]
    assert d["from_cache"] is True


# ---- glossary backend ----------------------------------------------------------------


@pytest.fixture()
def glossary():
    lex = Lexicon(
        [
            LexiconEntry("balo", glosses=[Gloss("eng", "house"), Gloss("spa", "casa")]),
            LexiconEntry("minu", glosses=[Gloss("eng", "water")]),
            LexiconEntry("se", glosses=[Gloss("spa", "de")]),  # no eng gloss
        ]
    )
    spec = TranslatorSpec(backend="glossary", direction=("toy", "eng"))
    return Translator(spec, lexicon=lex)


def test_glossary_token_by_token(glossary):
    result = glossary.translate("balo minu")
    assert result.text == "house water"
    assert result.unknown_tokens == []


def test_glossary_picks_target_language_gloss(glossary):
    # "se" has only a spa gloss, so it is unknown in the toy->eng direction
    result = glossary.translate("balo se")
    assert result.text == "house ⟦se⟧"
    assert result.unknown_tokens == ["se"]


def test_glossary_unknown_tokens_bracketed_and_deduped(glossary):
    result = glossary.translate("zuzu balo zuzu")
    assert result.text == "⟦zuzu⟧ house ⟦zuzu⟧"
    assert result.unknown_tokens == ["zuzu"]


def test_glossary_passes_punctuation_through(glossary):
    result = glossary.translate("balo, minu!")
    assert result.text == "house , water !"


# ---- cache ------------------------------------------------------------------------------


def test_cache_hit_and_stats(glossary):
    first = glossary.translate("balo minu")
    second = glossary.translate("balo minu")
    assert first.from_cache is False
    assert second.from_cache is True
    assert second.text == first.text
    assert second.unknown_tokens == first.unknown_tokens
    stats = glossary.cache_stats()
    assert stats == {"entries": 1, "hits": 1, "misses": 1}


def test_cache_expires_after_ttl():
    lex = make_lexicon(("balo", 1))
    spec = TranslatorSpec(backend="glossary", direction=("toy", "eng"), cache_ttl=0.05)
    t = Translator(spec, lexicon=lex)
    t.translate("balo")
    time.sleep(0.08)
    assert t.translate("balo").from_cache is False
    assert t.cache_stats()["hits"] == 0


def test_cache_zero_ttl_disables_reuse(glossary):
    spec = TranslatorSpec(backend="echo", direction=("toy", "eng"), cache_ttl=0.0)
    t = Translator(spec)
    t.translate("balo")
    assert t.translate("balo").from_cache is False


def test_cache_keyed_on_normalized_text(glossary):
    glossary.translate("café balo")
    result = glossary.translate("café balo")  # same text, decomposed
    assert result.from_cache is True


def test_cache_thread_safety(glossary):
    errors = []

    def worker():
        try:
            for _ in range(50):
                glossary.translate("balo minu")
        except Exception as exc:  # pragma: no cover - failure path
            errors.append(exc)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert not errors
    stats = glossary.cache_stats()
    assert stats["hits"] + stats["misses"] == 400


# ---- remote backend ---------------------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "ok"
    seen: list[dict] = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        type(self).seen.append(
            {"body": body, "auth": self.headers.get("Authorization")}
        )
        mode = type(self).behavior
        if mode == "slow":
            time.sleep(1.0)
            mode = "ok"
        if mode == "error":
            self.send_response(500)
            self.end_headers()
            return
        if mode == "notjson":
            payload = b"<html>not json</html>"
        elif mode == "missingkey":
            payload = json.dumps({"result": "nope"}).encode()
        else:
            payload = json.dumps(
                {"translation": body.get("text", "").upper()}
            ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.behavior = "ok"
    _StubHandler.seen = []
    yield f"http://127.0.0.1:{server.server_address[1]}/translate"
    server.shutdown()
    server.server_close()


def _remote_spec(endpoint, **kw):
    return TranslatorSpec(
        backend="remote", direction=("toy", "eng"), endpoint=endpoint, **kw
    )


def test_remote_round_trip(stub_server):
    t = Translator(_remote_spec(stub_server))
    result = t.translate("balo minu")
    assert result.text == "BALO MINU"
    assert result.backend == "remote"
    assert _StubHandler.seen[0]["body"] == {
        "text": "balo minu",
        "source": "toy",
        "target": "eng",
    }


def test_remote_bearer_token_from_env(stub_server, monkeypatch):
    monkeypatch.setenv("TOY_TRANSLATE_TOKEN", "sekrit")
    t = Translator(_remote_spec(stub_server, auth_env="TOY_TRANSLATE_TOKEN"))
    t.translate("balo")
    assert _StubHandler.seen[0]["auth"] == "Bearer sekrit"


def test_remote_no_header_when_env_unset(stub_server, monkeypatch):
    monkeypatch.delenv("TOY_TRANSLATE_TOKEN", raising=False)
    t = Translator(_remote_spec(stub_server, auth_env="TOY_TRANSLATE_TOKEN"))
    t.translate("balo")
    assert _StubHandler.seen[0]["auth"] is None


def test_remote_timeout(stub_server):
    _StubHandler.behavior = "slow"
    t = Translator(_remote_spec(stub_server, timeout=0.2))
    with pytest.raises(TranslationTimeout) as err:
        t.translate("balo")
    assert err.value.elapsed > 0


def test_remote_http_error_status(stub_server):
    _StubHandler.behavior = "error"
    t = Translator(_remote_spec(stub_server))
    with pytest.raises(TranslationHTTPError) as err:
        t.translate("balo")
    assert err.value.status == 500


def test_remote_invalid_json(stub_server):
    _StubHandler.behavior = "notjson"
    t = Translator(_remote_spec(stub_server))
    with pytest.raises(TranslationError, match="invalid JSON"):
        t.translate("balo")


def test_remote_missing_translation_key(stub_server):
    _StubHandler.behavior = "missingkey"
    t = Translator(_remote_spec(stub_server))
    with pytest.raises(TranslationError, match="translation"):
        t.translate("balo")


def test_remote_connection_refused():
    t = Translator(_remote_spec("http://127.0.0.1:9/translate", timeout=0.5))
    with pytest.raises(TranslationError):
        t.translate("balo")


def test_remote_cached_response_skips_network(stub_server):
    t = Translator(_remote_spec(stub_server))
    t.translate("balo")
    cached = t.translate("balo")
    assert cached.from_cache is True
    assert len(_StubHandler.seen) == 1


def test_remote_error_not_cached(stub_server):
    _StubHandler.behavior = "error"
    t = Translator(_remote_spec(stub_server))
    with pytest.raises(TranslationHTTPError):
        t.translate("balo")
    _StubHandler.behavior = "ok"
    result = t.translate("balo")
    assert result.from_cache is False
    assert result.text == "BALO"
