"""Provider-agnostic chat-completion client with record/replay caching.

Every request is content-addressed by a stable hash of (model id, messages,
sampling parameters). In REPLAY mode responses come exclusively from the
transcript store on disk, which makes every downstream pipeline stage a
deterministic function of its inputs; RECORD mode fills that store from a
live endpoint.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping

logger = logging.getLogger(__name__)

API_KEY_ENV_VAR = "COMPOSITION_MINER_API_KEY"
DEFAULT_BASE_URL = "https://api.openai.com/v1/chat/completions"


class LlmError(Exception):
    """Base class for client failures."""


class LlmUnavailableError(LlmError):
    """The endpoint could not produce a response (after retries)."""


class HttpError(LlmUnavailableError):
    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class RateLimitedError(HttpError):
    def __init__(self, message: str = "rate limited") -> None:
        super().__init__(message, status=429)


class CacheMissError(LlmError):
    """REPLAY mode was asked for a request that was never recorded."""


class Mode(Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


@dataclass(frozen=True)
class ChatRequest:
    """One chat-completion call: model, ordered messages, sampling knobs."""

    model_id: str
    messages: tuple[tuple[str, str], ...]
    sampling_params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(tuple(m) for m in self.messages))
        object.__setattr__(
            self, "sampling_params", tuple(sorted(tuple(self.sampling_params)))
        )
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0][0] not in ("system", "user"):
            raise ValueError(f"first message role {self.messages[0][0]!r} invalid")


def make_request(
    model_id: str,
    prompt: str,
    *,
    system: str | None = None,
    **sampling: Any,
) -> ChatRequest:
    """Single-turn user request; temperature defaults to 0 for determinism."""
    sampling.setdefault("temperature", 0)
    messages: list[tuple[str, str]] = []
    if system is not None:
        messages.append(("system", system))
    messages.append(("user", prompt))
    return ChatRequest(model_id, tuple(messages), tuple(sampling.items()))


def request_key(req: ChatRequest) -> str:
    """Stable content hash; identical requests share one transcript."""
    payload = {
        "model_id": req.model_id,
        "messages": [list(m) for m in req.messages],
        "sampling_params": {k: v for k, v in req.sampling_params},
    }
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Transcript:
    key: str
    response_text: str
    timestamp: str
    attempt_count: int = 1
    request: dict[str, Any] | None = None


class TranscriptStore:
    """Directory of ``<key>.json`` transcript files, one per unique request."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def __contains__(self, key: str) -> bool:
        return self._path(key).is_file()

    def get(self, key: str) -> Transcript | None:
        path = self._path(key)
        if not path.is_file():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        return Transcript(
            key=data["key"],
            response_text=data["response_text"],
            timestamp=data.get("timestamp", ""),
            attempt_count=int(data.get("attempt_count", 1)),
            request=data.get("request"),
        )

    def put(self, transcript: Transcript) -> None:
        doc = {
            "key": transcript.key,
            "response_text": transcript.response_text,
            "timestamp": transcript.timestamp,
            "attempt_count": transcript.attempt_count,
        }
        if transcript.request is not None:
            doc["request"] = transcript.request
        path = self._path(transcript.key)
        path.write_text(
            json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    def keys(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))


class _TokenBucket:
    """Serializes live calls to a requests-per-minute budget."""

    def __init__(self, rpm: float, sleep: Callable[[float], None]) -> None:
        self.interval = 60.0 / rpm
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            self._next_at = max(now, self._next_at) + self.interval
        if wait > 0:
            self._sleep(wait)


def _requests_transport(url: str, payload: dict, headers: Mapping[str, str]) -> str:
    import requests

    try:
        resp = requests.post(url, json=payload, headers=dict(headers), timeout=120)
    except requests.RequestException as exc:
        raise HttpError(f"request failed: {exc}") from exc
    if resp.status_code == 429:
        raise RateLimitedError()
    if resp.status_code != 200:
        raise HttpError(f"HTTP {resp.status_code}: {resp.text[:200]}", resp.status_code)
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, ValueError) as exc:
        raise HttpError(f"malformed completion payload: {exc}") from exc


class LlmClient:
    """Thread-safe chat-completion access in LIVE, RECORD or REPLAY mode.

    RECORD reuses an existing transcript before going to the network, so an
    interrupted recording run can resume without re-spending calls.
    """

    def __init__(
        self,
        mode: Mode,
        store: TranscriptStore | None = None,
        *,
        base_url: str = DEFAULT_BASE_URL,
        api_key: str | None = None,
        rpm: float | None = None,
        max_attempts: int = 5,
        backoff_base: float = 1.0,
        transport: Callable[[str, dict, Mapping[str, str]], str] | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if mode in (Mode.RECORD, Mode.REPLAY) and store is None:
            raise ValueError(f"{mode.value} mode requires a transcript store")
        self.mode = mode
        self.store = store
        self.base_url = base_url
        self._api_key = api_key
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._transport = transport or _requests_transport
        self._sleep = sleep
        self._bucket = _TokenBucket(rpm, sleep) if rpm else None

    def complete(self, req: ChatRequest) -> str:
        key = request_key(req)
        if self.mode is Mode.REPLAY:
            transcript = self.store.get(key)
            if transcript is None:
                raise CacheMissError(f"no transcript for key {key}")
            return transcript.response_text
        if self.mode is Mode.RECORD:
            transcript = self.store.get(key)
            if transcript is not None:
                return transcript.response_text
        text, attempts = self._call_live(req)
        if self.mode is Mode.RECORD:
            self.store.put(
                Transcript(
                    key=key,
                    response_text=text,
                    timestamp=datetime.now(timezone.utc).isoformat(),
                    attempt_count=attempts,
                    request={
                        "model_id": req.model_id,
                        "messages": [list(m) for m in req.messages],
                        "sampling_params": dict(req.sampling_params),
                    },
                )
            )
        return text

    def _call_live(self, req: ChatRequest) -> tuple[str, int]:
        api_key = self._api_key or os.environ.get(API_KEY_ENV_VAR)
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload: dict[str, Any] = {
            "model": req.model_id,
            "messages": [{"role": role, "content": text} for role, text in req.messages],
        }
        payload.update(dict(req.sampling_params))
        last_error: HttpError | None = None
        for attempt in range(1, self.max_attempts + 1):
            if self._bucket is not None:
                self._bucket.acquire()
            try:
                return self._transport(self.base_url, payload, headers), attempt
            except HttpError as exc:
                last_error = exc
                if attempt < self.max_attempts:
                    delay = self.backoff_base * (2 ** (attempt - 1))
                    logger.warning(
                        "attempt %d/%d failed (%s); retrying in %.1fs",
                        attempt,
                        self.max_attempts,
                        exc,
                        delay,
                    )
                    self._sleep(delay)
        assert last_error is not None
        raise last_error
