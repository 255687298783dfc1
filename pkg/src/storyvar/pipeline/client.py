"""Chat transports: a live OpenAI-compatible client and a replaying one."""

from __future__ import annotations

import logging
import os
import time
from typing import Optional, Protocol, Sequence

import httpx

from ..errors import ConfigurationError, ReplayDivergenceError, TransportError

log = logging.getLogger(__name__)

Message = dict  # {"role": ..., "content": ...}


class ChatClient(Protocol):
    def complete(self, messages: Sequence[Message]) -> str:
        """Return the assistant answer to the full message history."""


class LiveChatClient:
    """Minimal client for an OpenAI-compatible ``/chat/completions`` endpoint.

    The credential is read from the environment variable ``credential_env`` at
    call time and never kept on the instance.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        credential_env: str = "OPENAI_API_KEY",
        temperature: Optional[float] = None,
        timeout: float = 300.0,
        retries: int = 2,
        backoff: float = 2.0,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env
        self.temperature = temperature
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._transport = transport

    @property
    def url(self) -> str:
        base = self.endpoint.rstrip("/")
        return base if base.endswith("/chat/completions") else base + "/chat/completions"

    def complete(self, messages: Sequence[Message]) -> str:
        key = os.environ.get(self.credential_env)
        if not key:
            raise ConfigurationError(f"credential variable {self.credential_env} is not set")
        payload = {"model": self.model, "messages": list(messages)}
        if self.temperature is not None:
            payload["temperature"] = self.temperature
        headers = {"Authorization": f"Bearer {key}"}

        attempt = 0
        while True:
            try:
                with httpx.Client(transport=self._transport, timeout=self.timeout) as http:
                    resp = http.post(self.url, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                err = TransportError(f"request to {self.url} failed: {exc}", retriable=True)
            else:
                if resp.status_code == 200:
                    return _answer_text(resp)
                retriable = resp.status_code == 429 or resp.status_code >= 500
                err = TransportError(
                    f"{self.url} answered HTTP {resp.status_code}: {resp.text[:200]}",
                    retriable=retriable,
                )
            if not err.retriable or attempt >= self.retries:
                raise err
            attempt += 1
            log.warning("%s; retry %d/%d", err, attempt, self.retries)
            time.sleep(self.backoff * attempt)


def _answer_text(resp: httpx.Response) -> str:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"malformed chat completion: {exc}", retriable=False) from None
    if not isinstance(content, str):
        raise TransportError("chat completion has no text content", retriable=False)
    return content


def first_difference(expected: str, actual: str) -> str:
    exp, act = expected.splitlines(), actual.splitlines()
    for i, (a, b) in enumerate(zip(exp, act), start=1):
        if a != b:
            return f"line {i}: recorded {a!r}, rendered {b!r}"
    if len(exp) != len(act):
        i = min(len(exp), len(act)) + 1
        rec = exp[i - 1] if i <= len(exp) else "<end>"
        ren = act[i - 1] if i <= len(act) else "<end>"
        return f"line {i}: recorded {rec!r}, rendered {ren!r}"
    return "line endings differ"


class ReplayChatClient:
    """Serve recorded answers, checking each prompt against the recording."""

    def __init__(self, exchanges: Sequence):
        self._exchanges = list(exchanges)
        self._cursor = 0

    def complete(self, messages: Sequence[Message]) -> str:
        if self._cursor >= len(self._exchanges):
            raise ReplayDivergenceError(
                f"replay exhausted after {len(self._exchanges)} recorded exchanges"
            )
        recorded = self._exchanges[self._cursor]
        prompt = messages[-1]["content"]
        if prompt != recorded.prompt:
            raise ReplayDivergenceError(
                f"prompt of step {recorded.step} differs from the recording at "
                + first_difference(recorded.prompt, prompt)
            )
        self._cursor += 1
        return recorded.answer


def chat_round(client: ChatClient, history: list, prompt: str) -> str:
    """Send ``prompt`` after ``history`` and append both turns to it."""
    history.append({"role": "user", "content": prompt})
    try:
        answer = client.complete(list(history))
    except Exception:
        history.pop()
        raise
    history.append({"role": "assistant", "content": answer})
    return answer
