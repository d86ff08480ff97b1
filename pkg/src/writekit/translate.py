"""Pluggable translation backends behind one call shape.

Three backends:

- "echo": returns the input (pipeline plumbing and latency testing)
- "glossary": token-by-token lexicon gloss lookup; unknown word tokens
  come back wrapped in white brackets and listed separately
- "remote": POST {"text", "source", "target"} to a JSON endpoint that
  answers {"translation": ...}; the bearer token is read from the
  environment variable named by TranslatorSpec.auth_env, never stored
  inline

Results are cached per input text with a TTL; the cache is
thread-safe and its hit/miss counters are observable.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field

import httpx

from .errors import (
    ConfigError,
    DataError,
    TranslationError,
    TranslationHTTPError,
    TranslationTimeout,
)
from .lexicon import Lexicon
from .tokenize import is_word_token, normalize, tokenize

BACKENDS = ("echo", "glossary", "remote")


@dataclass(frozen=True)
class TranslatorSpec:
    backend: str
    direction: tuple[str, str]
    endpoint: str = ""
    auth_env: str = ""
    timeout: float = 10.0
    cache_ttl: float = 300.0

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if len(self.direction) != 2 or not all(self.direction):
            raise ConfigError("direction must be a (source, target) pair of language codes")
        if self.direction[0] == self.direction[1]:
            raise ConfigError("source and target language must differ")
        if self.backend == "remote" and not self.endpoint:
            raise ConfigError("remote backend requires an endpoint URL")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.cache_ttl < 0:
            raise ConfigError(f"cache_ttl must be >= 0, got {self.cache_ttl}")


@dataclass(frozen=True)
class TranslationResult:
    text: str
    unknown_tokens: list[str] = field(default_factory=list)
    backend: str = ""
    direction: tuple[str, str] = ("", "")
    latency: float = 0.0
    from_cache: bool = False

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "unknown_tokens": self.unknown_tokens,
            "backend": self.backend,
            "direction": list(self.direction),
            "latency": self.latency,
            "from_cache": self.from_cache,
        }


class Translator:
    def __init__(self, spec: TranslatorSpec, lexicon: Lexicon | None = None):
        if spec.backend == "glossary" and lexicon is None:
            raise ConfigError("glossary backend requires a lexicon")
        self.spec = spec
        self.lexicon = lexicon
        self._cache: dict[str, tuple[float, str, list[str]]] = {}
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0

    def translate(self, text: str) -> TranslationResult:
        if not text or not text.strip():
            raise DataError("cannot translate empty text")
        text = normalize(text)
        started = time.perf_counter()
        now = time.monotonic()
        with self._lock:
            entry = self._cache.get(text)
            if entry is not None and entry[0] > now:
                self._hits += 1
                return TranslationResult(
                    text=entry[1],
                    unknown_tokens=list(entry[2]),
                    backend=self.spec.backend,
                    direction=self.spec.direction,
                    latency=time.perf_counter() - started,
                    from_cache=True,
                )
            self._misses += 1
        if self.spec.backend == "echo":
            translated, unknown = text, []
        elif self.spec.backend == "glossary":
            translated, unknown = self._gloss(text)
        else:
            translated, unknown = self._remote(text)
        with self._lock:
            self._cache[text] = (
                time.monotonic() + self.spec.cache_ttl,
                translated,
                list(unknown),
            )
        return TranslationResult(
            text=translated,
            unknown_tokens=unknown,
            backend=self.spec.backend,
            direction=self.spec.direction,
            latency=time.perf_counter() - started,
            from_cache=False,
        )

    def cache_stats(self) -> dict:
        now = time.monotonic()
        with self._lock:
            live = sum(1 for expiry, _, _ in self._cache.values() if expiry > now)
            return {"entries": live, "hits": self._hits, "misses": self._misses}

    # ---- backends --------------------------------------------------------

    def _gloss(self, text: str) -> tuple[str, list[str]]:
        target = self.spec.direction[1]
        out = []
        unknown = []
        for tok in tokenize(text):
            if not is_word_token(tok):
                out.append(tok)
                continue
            entry = self.lexicon.get(tok)
            gloss = None
            if entry is not None:
                for g in entry.glosses:
                    if g.lang == target:
                        gloss = g.text
                        break
            if gloss is None:
                out.append(f"⟦{tok}⟧")
                if tok not in unknown:
                    unknown.append(tok)
            else:
                out.append(gloss)
        return " ".join(out), unknown

    def _remote(self, text: str) -> tuple[str, list[str]]:
        headers = {}
        if self.spec.auth_env:
            token = os.environ.get(self.spec.auth_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        payload = {
            "text": text,
            "source": self.spec.direction[0],
            "target": self.spec.direction[1],
        }
        started = time.perf_counter()
        try:
            resp = httpx.post(
                self.spec.endpoint,
                json=payload,
                headers=headers,
                timeout=self.spec.timeout,
            )
        except httpx.TimeoutException as exc:
            elapsed = time.perf_counter() - started
            raise TranslationTimeout(
                f"translation request timed out after {elapsed:.2f}s "
                f"(limit {self.spec.timeout}s)",
                elapsed=elapsed,
            ) from exc
        except httpx.HTTPError as exc:
            raise TranslationError(f"translation request failed: {exc}") from exc
        if not 200 <= resp.status_code < 300:
            raise TranslationHTTPError(
                f"translation endpoint returned HTTP {resp.status_code}",
                status=resp.status_code,
            )
        try:
            body = resp.json()
        except ValueError as exc:
            raise TranslationError("translation endpoint returned invalid JSON") from exc
        if not isinstance(body, dict) or "translation" not in body:
            raise TranslationError(
                "translation endpoint response is missing the 'translation' key"
            )
        return str(body["translation"]), []
