"""Language-model providers: a live HTTP chat client and deterministic replay."""
from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Protocol, Sequence

import httpx

Message = dict[str, str]  # {"role": ..., "content": ...}

API_KEY_ENV = "COBBIE_API_KEY"


class ProviderError(RuntimeError):
    pass


class LlmProvider(Protocol):
    def complete(self, system_prompt: str, messages: Sequence[Message], session_id: str) -> str: ...


def turn_index(messages: Sequence[Message]) -> int:
    """Turn number of the next reply: the count of assistant messages so far."""
    return sum(1 for m in messages if m["role"] == "assistant")


class ReplayProvider:
    """Serves canned replies keyed by ``(session_id, turn)``.

    The turn is derived from the message history, so replay is stateless and
    safe under concurrent sessions.
    """

    def __init__(self, script: dict[tuple[str, int], str]):
        self.script = dict(script)

    @classmethod
    def from_records(cls, records) -> "ReplayProvider":
        script = {}
        for r in records:
            key = (str(r["task_id"]), int(r["turn"]))
            if key in script:
                raise ValueError(f"duplicate replay record for {key}")
            script[key] = r["response"]
        return cls(script)

    @classmethod
    def from_jsonl(cls, path: str | os.PathLike) -> "ReplayProvider":
        with open(path, encoding="utf-8") as fh:
            return cls.from_records(json.loads(line) for line in fh if line.strip())

    def complete(self, system_prompt: str, messages: Sequence[Message], session_id: str) -> str:
        turn = turn_index(messages)
        try:
            return self.script[(session_id, turn)]
        except KeyError:
            raise ProviderError(f"replay script has no response for session {session_id!r} turn {turn}") from None


class RecordingProvider:
    """Wraps a provider and keeps every reply in replay-script form."""

    def __init__(self, inner: LlmProvider):
        self.inner = inner
        self.records: list[dict] = []
        self._lock = threading.Lock()

    def complete(self, system_prompt: str, messages: Sequence[Message], session_id: str) -> str:
        reply = self.inner.complete(system_prompt, messages, session_id)
        with self._lock:
            self.records.append({"task_id": session_id, "turn": turn_index(messages), "response": reply})
        return reply

    def save(self, path: str | os.PathLike) -> None:
        with self._lock:
            rows = sorted(self.records, key=lambda r: (r["task_id"], r["turn"]))
        Path(path).write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


class HttpChatProvider:
    """OpenAI-compatible ``/chat/completions`` client with bounded retries.

    Transport errors, 429 and 5xx responses are retried up to ``max_retries``
    times with exponential backoff; anything else fails immediately.
    """

    def __init__(self, base_url: str, model_name: str, temperature: float = 0.0, api_key: str | None = None,
                 timeout: float = 120.0, max_retries: int = 3, backoff: float = 1.0,
                 transport: httpx.BaseTransport | None = None):
        self.base_url = base_url.rstrip("/")
        self.model_name = model_name
        self.temperature = temperature
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.max_retries = max_retries
        self.backoff = backoff
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def _payload(self, system_prompt: str, messages: Sequence[Message]) -> dict:
        return {
            "model": self.model_name,
            "temperature": self.temperature,
            "messages": [{"role": "system", "content": system_prompt}, *messages],
        }

    def complete(self, system_prompt: str, messages: Sequence[Message], session_id: str) -> str:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = self._payload(system_prompt, messages)
        last = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._client.post(f"{self.base_url}/chat/completions", json=body, headers=headers)
            except httpx.TransportError as e:
                last = f"transport error: {e}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise ProviderError("malformed chat completion response") from None
        raise ProviderError(f"giving up after {self.max_retries} retries: {last}")

    def close(self) -> None:
        self._client.close()
