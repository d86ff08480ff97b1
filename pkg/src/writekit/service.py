"""HTTP JSON API over the lexicon, predictor, spell checker, translator.

The service starts with whatever models its config points at; a missing
or unloadable model disables only the endpoints that need it (503),
never startup. Every read endpoint builds its payload through the same
public builder functions and the same encoder (dump_json), so clients
and tests can reproduce response bytes exactly from library calls.

Privacy: the only write path is POST /log, which requires an explicit
consent flag and accepts a payload of at most one suggestion token and
its rank. Document text cannot be stored: multi-token payloads are
rejected structurally, and the server runs with access logs off so
query strings never land in a log file either.
"""

from __future__ import annotations

import json
import sys
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from .errors import ConfigError, DataError, TranslationError, WritekitError
from .langid import LanguageIdentifier
from .lexicon import Lexicon, load_lexicon
from .predict import WordPredictor
from .spell import check_sentence
from .translate import Translator, TranslatorSpec

EVENT_KINDS = (
    "completion_shown",
    "completion_accepted",
    "nextword_shown",
    "nextword_accepted",
    "spell_shown",
    "spell_accepted",
    "translate_requested",
)

_MAX_SUGGESTION_LEN = 64


def dump_json(obj) -> bytes:
    """The one JSON encoding used for every response body."""
    return json.dumps(
        obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8077
    lexicon_path: str = ""
    ngram_model_path: str = ""
    langid_model_path: str = ""
    translator: TranslatorSpec | None = None
    log_enabled: bool = False
    log_path: str = ""
    default_k: int = 5
    default_max_dist: int = 2
    edit_penalty: float = 4.0
    cors_origins: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, obj: dict) -> "ServiceConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {
            "host", "port", "lexicon", "ngram_model", "langid_model",
            "translator", "logging", "defaults", "cors",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        translator = None
        if obj.get("translator"):
            t = obj["translator"]
            direction = t.get("direction", [])
            translator = TranslatorSpec(
                backend=t.get("backend", "echo"),
                direction=tuple(direction),
                endpoint=t.get("endpoint", ""),
                auth_env=t.get("auth_env", ""),
                timeout=float(t.get("timeout", 10.0)),
                cache_ttl=float(t.get("cache_ttl", 300.0)),
            )
        logging_cfg = obj.get("logging", {})
        defaults = obj.get("defaults", {})
        cors = obj.get("cors", {})
        origins = cors.get("allow_origins", []) if isinstance(cors, dict) else None
        if origins is None or not all(isinstance(o, str) and o for o in origins):
            raise ConfigError("cors.allow_origins must be a list of origin strings")
        cfg = cls(
            host=obj.get("host", "127.0.0.1"),
            port=int(obj.get("port", 8077)),
            lexicon_path=obj.get("lexicon", ""),
            ngram_model_path=obj.get("ngram_model", ""),
            langid_model_path=obj.get("langid_model", ""),
            translator=translator,
            log_enabled=bool(logging_cfg.get("enabled", False)),
            log_path=logging_cfg.get("path", ""),
            default_k=int(defaults.get("k", 5)),
            default_max_dist=int(defaults.get("max_dist", 2)),
            edit_penalty=float(defaults.get("edit_penalty", 4.0)),
            cors_origins=tuple(origins),
        )
        if cfg.log_enabled and not cfg.log_path:
            raise ConfigError("logging.enabled requires logging.path")
        if cfg.default_k < 1 or cfg.default_max_dist < 0:
            raise ConfigError("defaults.k must be >= 1 and defaults.max_dist >= 0")
        return cfg


def load_config(path) -> ServiceConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from exc
    return ServiceConfig.from_dict(obj)


class UsageLog:
    """Append-only JSONL event log; one lock serializes writers."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()


# ---- payload builders (shared by endpoints, tests, and clients) -----------


def lookup_payload(lexicon: Lexicon, query: str, max_dist: int, k: int) -> dict:
    matches = [
        {
            "headword": entry.headword,
            "dist": dist,
            "freq": entry.freq,
            "pos": entry.pos,
            "glosses": [{"lang": g.lang, "text": g.text} for g in entry.glosses],
        }
        for entry, dist in lexicon.lookup_approx(query, max_dist=max_dist, k=k)
    ]
    return {"query": query, "max_dist": max_dist, "matches": matches}


def complete_payload(lexicon: Lexicon, prefix: str, k: int) -> dict:
    completions = [
        {
            "headword": entry.headword,
            "freq": entry.freq,
            "pos": entry.pos,
            "glosses": [{"lang": g.lang, "text": g.text} for g in entry.glosses],
        }
        for entry in lexicon.complete_prefix(prefix, k=k)
    ]
    return {"prefix": prefix, "completions": completions}


def next_payload(model: WordPredictor, context: str, k: int) -> dict:
    return {
        "context": context,
        "suggestions": [s.to_dict() for s in model.suggest(context, k=k)],
    }


def spell_payload(
    lexicon: Lexicon, lm, text: str, max_dist: int, k: int, edit_penalty: float
) -> dict:
    flags = check_sentence(
        text, lexicon, lm=lm, max_dist=max_dist, k=k, edit_penalty=edit_penalty
    )
    return {"flags": [f.to_dict() for f in flags]}


# ---- app -------------------------------------------------------------------


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=dump_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(message: str, status_code: int) -> Response:
    return _json_response({"error": message}, status_code=status_code)


def _load_models(config: ServiceConfig):
    def try_load(label, path, loader):
        if not path:
            return None
        try:
            return loader(path)
        except (OSError, WritekitError) as exc:
            print(f"warning: {label} not loaded ({exc})", file=sys.stderr)
            return None

    lexicon = try_load("lexicon", config.lexicon_path, load_lexicon)
    ngram = try_load("ngram model", config.ngram_model_path, WordPredictor.load)
    langid = try_load("langid model", config.langid_model_path, LanguageIdentifier.load)
    translator = None
    if config.translator is not None:
        try:
            translator = Translator(config.translator, lexicon=lexicon)
        except ConfigError as exc:
            print(f"warning: translator not available ({exc})", file=sys.stderr)
    return lexicon, ngram, langid, translator


def _int_param(request: Request, name: str, default: int) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"{name} must be an integer")


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="writekit", docs_url=None, redoc_url=None, openapi_url=None)
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["content-type"],
        )
    lexicon, ngram, langid, translator = _load_models(config)
    usage_log = UsageLog(config.log_path) if config.log_enabled and config.log_path else None

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(_request, exc):
        return _error(str(exc.detail), exc.status_code)

    @app.exception_handler(WritekitError)
    async def _domain_error(_request, exc):
        return _error(str(exc), 400)

    @app.get("/health")
    async def health():
        return _json_response(
            {
                "status": "ok",
                "models": {
                    "lexicon": lexicon is not None,
                    "ngram": ngram is not None,
                    "langid": langid is not None,
                    "translator": translator is not None,
                },
            }
        )

    @app.get("/lookup")
    async def lookup(request: Request):
        if lexicon is None:
            return _error("lexicon not loaded", 503)
        query = request.query_params.get("q", "")
        if not query:
            return _error("missing required parameter 'q'", 400)
        max_dist = _int_param(request, "max_dist", config.default_max_dist)
        k = _int_param(request, "k", config.default_k)
        return _json_response(lookup_payload(lexicon, query, max_dist, k))

    @app.get("/complete")
    async def complete(request: Request):
        if lexicon is None:
            return _error("lexicon not loaded", 503)
        prefix = request.query_params.get("prefix", "")
        k = _int_param(request, "k", config.default_k)
        return _json_response(complete_payload(lexicon, prefix, k))

    @app.get("/next")
    async def next_word(request: Request):
        if ngram is None:
            return _error("ngram model not loaded", 503)
        context = request.query_params.get("context", "")
        k = _int_param(request, "k", config.default_k)
        return _json_response(next_payload(ngram, context, k))

    async def _body(request: Request) -> dict:
        try:
            body = json.loads(await request.body())
        except (ValueError, UnicodeDecodeError):
            raise HTTPException(status_code=400, detail="request body must be JSON")
        if not isinstance(body, dict):
            raise HTTPException(status_code=400, detail="request body must be a JSON object")
        return body

    @app.post("/spell")
    async def spell(request: Request):
        if lexicon is None:
            return _error("lexicon not loaded", 503)
        body = await _body(request)
        text = body.get("text")
        if not isinstance(text, str) or not text:
            return _error("body must include a non-empty 'text' string", 400)
        return _json_response(
            spell_payload(
                lexicon,
                ngram,
                text,
                config.default_max_dist,
                config.default_k,
                config.edit_penalty,
            )
        )

    @app.post("/translate")
    async def translate(request: Request):
        if translator is None:
            return _error("no translator configured", 503)
        body = await _body(request)
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            return _error("body must include a non-empty 'text' string", 400)
        configured = "-".join(translator.spec.direction)
        direction = body.get("direction", configured)
        if direction != configured:
            return _error(
                f"unsupported direction {direction!r}; this service translates {configured}",
                400,
            )
        try:
            result = translator.translate(text)
        except TranslationError as exc:
            return _error(str(exc), 502)
        except DataError as exc:
            return _error(str(exc), 400)
        return _json_response(result.to_dict())

    @app.post("/log")
    async def log_event(request: Request):
        body = await _body(request)
        # consent gate comes before any other processing: no consent, no
        # validation, no write, nothing echoed back
        if body.get("consent") is not True:
            return Response(status_code=204)
        extra = set(body) - {"consent", "kind", "session", "payload"}
        if extra:
            return _error(f"unknown event fields: {sorted(extra)}", 400)
        kind = body.get("kind")
        if kind not in EVENT_KINDS:
            return _error(f"kind must be one of {list(EVENT_KINDS)}", 400)
        session = body.get("session", "")
        if not isinstance(session, str) or len(session) > 128:
            return _error("session must be a string of at most 128 chars", 400)
        payload = body.get("payload", {})
        if not isinstance(payload, dict) or set(payload) - {"suggestion", "rank"}:
            return _error(
                "payload must be an object with only 'suggestion' and 'rank'", 400
            )
        event = {"ts": round(time.time(), 3), "session": session, "kind": kind}
        if "suggestion" in payload:
            suggestion = payload["suggestion"]
            if (
                not isinstance(suggestion, str)
                or not suggestion
                or len(suggestion) > _MAX_SUGGESTION_LEN
                or any(ch.isspace() for ch in suggestion)
            ):
                return _error(
                    "payload.suggestion must be a single token (no whitespace, "
                    f"at most {_MAX_SUGGESTION_LEN} chars)",
                    400,
                )
            event["suggestion"] = suggestion
        if "rank" in payload:
            rank = payload["rank"]
            if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
                return _error("payload.rank must be a positive integer", 400)
            event["rank"] = rank
        if usage_log is None:
            return Response(status_code=204)
        usage_log.append(event)
        return _json_response({"logged": True})

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service; blocks until shutdown.

    Access logging is off on purpose: query strings carry user text.
    """
    import uvicorn

    uvicorn.run(
        create_app(config),
        host=config.host,
        port=config.port,
        access_log=False,
        log_level="warning",
    )
