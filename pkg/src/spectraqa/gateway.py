"""Single choke point for model calls: an OpenAI-compatible chat-completion
client with retry, backoff, and rate limiting, plus deterministic mock
backends for offline runs.

The HTTP client takes injectable transport, clock, sleep, and rng so tests can
script fault sequences and assert retry/rate-limit behavior against a virtual
clock.
"""
from __future__ import annotations

import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Protocol, Sequence, Tuple
from urllib.parse import urlparse

import httpx

from .errors import GatewayError

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


def _env_api_key() -> str:
    return os.environ.get("SPECTRAQA_API_KEY", os.environ.get("OPENAI_API_KEY", ""))


@dataclass
class GatewayConfig:
    base_url: str = "https://api.openai.com/v1"
    model_name: str = "gpt-3.5-turbo"
    api_key: str = ""
    timeout: float = 60.0
    max_retries: int = 3
    rate_limit_per_minute: int = 60
    backoff_base: float = 1.0
    backoff_factor: float = 2.0
    jitter: float = 0.1
    extraction_temperature: float = 0.0
    generation_temperature: float = 0.7

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        parts = urlparse(self.base_url)
        if not parts.scheme or not parts.netloc:
            raise ValueError(f"base_url is not a valid URL: {self.base_url!r}")

    @classmethod
    def from_file(cls, path: str) -> "GatewayConfig":
        """Load non-secret settings from a JSON file; the API key comes from the env."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        allowed = {k: v for k, v in data.items() if k in cls.__dataclass_fields__ and k != "api_key"}
        config = cls(**allowed)
        config.api_key = _env_api_key()
        return config

    @classmethod
    def from_file_or_env(cls, path: Optional[str] = None) -> "GatewayConfig":
        if path:
            return cls.from_file(path)
        config = cls(
            base_url=os.environ.get("SPECTRAQA_BASE_URL", "https://api.openai.com/v1"),
            model_name=os.environ.get("SPECTRAQA_MODEL", "gpt-3.5-turbo"),
        )
        config.api_key = _env_api_key()
        return config


@dataclass
class Completion:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency: float = 0.0


@dataclass
class Attempt:
    index: int
    status: Optional[int]
    error: Optional[str]
    backoff: float


class Gateway(Protocol):
    def complete(self, prompt: str, temperature: Optional[float] = None) -> Completion: ...


class RateLimiter:
    """Sliding-window limiter: at most `limit` dispatches in any `window` seconds."""

    def __init__(
        self,
        limit: int,
        window: float = 60.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.limit = limit
        self.window = window
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._dispatches: List[float] = []

    def acquire(self) -> float:
        """Block until a slot is free; returns the dispatch time."""
        while True:
            with self._lock:
                now = self._clock()
                horizon = now - self.window
                self._dispatches = [t for t in self._dispatches if t > horizon]
                if len(self._dispatches) < self.limit:
                    self._dispatches.append(now)
                    return now
                wait = self._dispatches[0] + self.window - now
            self._sleep(max(wait, 0.0))


class HttpGateway:
    """OpenAI-compatible chat-completions client with bounded retries.

    Retries transport failures, 5xx, and 429 with exponential backoff
    (base * factor^n plus jitter); other 4xx fail immediately. At most
    max_retries + 1 attempts occur per call.
    """

    def __init__(
        self,
        config: GatewayConfig,
        transport: Optional[httpx.BaseTransport] = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
        rng: Optional[random.Random] = None,
    ):
        self.config = config
        self._clock = clock
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._client = httpx.Client(transport=transport, timeout=config.timeout)
        self.rate_limiter = RateLimiter(
            config.rate_limit_per_minute, clock=clock, sleep=sleep
        )

    def close(self) -> None:
        self._client.close()

    def complete(self, prompt: str, temperature: Optional[float] = None) -> Completion:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        config = self.config
        url = config.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.generation_temperature if temperature is None else temperature,
        }
        headers = {"Content-Type": "application/json"}
        if config.api_key:
            headers["Authorization"] = f"Bearer {config.api_key}"

        attempts: List[Attempt] = []
        for attempt_index in range(config.max_retries + 1):
            self.rate_limiter.acquire()
            started = self._clock()
            status: Optional[int] = None
            error: Optional[str] = None
            try:
                response = self._client.post(url, json=body, headers=headers)
                status = response.status_code
                if status == 200:
                    payload = response.json()
                    usage = payload.get("usage") or {}
                    attempts.append(Attempt(attempt_index, status, None, 0.0))
                    return Completion(
                        text=payload["choices"][0]["message"]["content"],
                        prompt_tokens=int(usage.get("prompt_tokens", 0)),
                        completion_tokens=int(usage.get("completion_tokens", 0)),
                        latency=self._clock() - started,
                    )
                error = f"HTTP {status}"
                if status not in RETRYABLE_STATUS:
                    attempts.append(Attempt(attempt_index, status, error, 0.0))
                    raise GatewayError(
                        f"non-retryable response {status}", attempts=attempts, retryable=False
                    )
            except httpx.HTTPError as exc:
                error = f"transport: {exc}"
            backoff = 0.0
            if attempt_index < config.max_retries:
                backoff = config.backoff_base * config.backoff_factor**attempt_index
                backoff *= 1 + config.jitter * self._rng.random()
            attempts.append(Attempt(attempt_index, status, error, backoff))
            if attempt_index < config.max_retries:
                self._sleep(backoff)
        raise GatewayError(
            f"exhausted {config.max_retries + 1} attempts", attempts=attempts, retryable=True
        )


class MockGateway:
    """Scripted backend: first prompt-substring rule wins, default otherwise.

    Records every prompt for assertions.
    """

    def __init__(
        self,
        script: Optional[Sequence[Tuple[str, str]]] = None,
        default: str = "",
    ):
        if isinstance(script, dict):
            script = list(script.items())
        self.script: List[Tuple[str, str]] = list(script or [])
        self.default = default
        self.calls: List[str] = []

    def complete(self, prompt: str, temperature: Optional[float] = None) -> Completion:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        self.calls.append(prompt)
        text = self.default
        for needle, response in self.script:
            if needle in prompt:
                text = response
                break
        return Completion(
            text=text,
            prompt_tokens=len(prompt.split()),
            completion_tokens=len(text.split()),
            latency=0.0,
        )


_TAG_RE = re.compile(r"(?<!\\)\[([^\[\]\\]+)\]")


class CitationEchoGateway:
    """Deterministic offline answerer: cites the paper ids it finds in the
    prompt's knowledge block, phrased in the researcher style."""

    def __init__(self, max_citations: int = 3):
        self.max_citations = max_citations
        self.calls: List[str] = []

    def complete(self, prompt: str, temperature: Optional[float] = None) -> Completion:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        self.calls.append(prompt)
        seen: List[str] = []
        for tag in _TAG_RE.findall(prompt):
            if tag not in seen:
                seen.append(tag)
        cited = seen[: self.max_citations]
        if cited:
            tags = " ".join(f"[{pid}]" for pid in cited)
            text = (
                "Related studies show that the retrieved literature addresses this "
                f"question directly {tags}. The cited records describe the applicable "
                "methods and their reported outcomes."
            )
        else:
            text = "No supporting literature was found in the corpus for this question."
        return Completion(
            text=text,
            prompt_tokens=len(prompt.split()),
            completion_tokens=len(text.split()),
            latency=0.0,
        )


class FailingGateway:
    """Always raises a transport-style gateway error; for failure-path tests."""

    def complete(self, prompt: str, temperature: Optional[float] = None) -> Completion:
        raise GatewayError("scripted outage", attempts=[Attempt(0, None, "down", 0.0)])
