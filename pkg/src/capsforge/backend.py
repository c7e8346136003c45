"""Chat-completion backend client with retry and backoff.

The wire protocol is the common chat-completion shape: POST a JSON body
``{model, temperature, messages: [{role, content}]}`` and read the
first choice's message content. The bearer token comes from the
environment variable named in the config, so keys never land in shard
metadata or logs.
"""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass
from typing import Callable

import requests

from .errors import BackendError

BACKOFF_BASE_S = 1.0
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2
BACKOFF_CAP_S = 60.0

_RETRYABLE_STATUSES = {408, 409, 429, 500, 502, 503, 504}


@dataclass(frozen=True)
class BackendConfig:
    endpoint_url: str
    model_name: str
    api_key_env: str = "CAPSFORGE_API_KEY"
    max_in_flight: int = 8
    timeout_ms: int = 30_000
    temperature: float = 0.0
    max_retries: int = 3

    def validate(self) -> None:
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.timeout_ms < 1000:
            raise ValueError("timeout_ms must be >= 1000")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


class TransportError(Exception):
    """One failed attempt; ``status`` as in ``BackendError``."""

    def __init__(self, status, detail: str = "", retryable: bool = True):
        self.status = status
        self.detail = detail
        self.retryable = retryable
        super().__init__(f"{status}: {detail}")


def backoff_delay(attempt: int, rng: random.Random | None = None) -> float:
    """Delay before retry ``attempt`` (0-based): exponential, jittered, capped."""
    delay = min(BACKOFF_BASE_S * (BACKOFF_FACTOR**attempt), BACKOFF_CAP_S)
    jitter = (rng or random).uniform(-BACKOFF_JITTER, BACKOFF_JITTER)
    return max(0.0, delay * (1.0 + jitter))


def _http_transport(config: BackendConfig) -> Callable[[dict], str]:
    session = requests.Session()
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(config.api_key_env, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"

    def send(body: dict) -> str:
        try:
            resp = session.post(
                config.endpoint_url,
                json=body,
                headers=headers,
                timeout=config.timeout_ms / 1000.0,
            )
        except requests.Timeout as exc:
            raise TransportError("timeout", str(exc)) from exc
        except requests.RequestException as exc:
            raise TransportError("connection", str(exc)) from exc
        if resp.status_code != 200:
            raise TransportError(
                resp.status_code,
                resp.text[:200],
                retryable=resp.status_code in _RETRYABLE_STATUSES,
            )
        try:
            payload = resp.json()
            return payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError("bad_response", str(exc), retryable=False) from exc

    return send


class ChatBackend:
    """Issues one chat completion per call, retrying transient failures.

    ``transport`` may be injected (tests use deterministic in-process
    mocks); the default speaks HTTP via ``requests``.
    """

    def __init__(
        self,
        config: BackendConfig,
        transport: Callable[[dict], str] | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        config.validate()
        self.config = config
        self._transport = transport or _http_transport(config)
        self._sleep = sleep
        self._rng = random.Random()

    def complete(self, prompt: str) -> tuple[str, int]:
        """Return (reply text, attempts used); raises ``BackendError``."""
        body = {
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        attempts = self.config.max_retries + 1
        last: TransportError | None = None
        attempted = 0
        for attempt in range(attempts):
            attempted = attempt + 1
            try:
                return self._transport(body), attempted
            except TransportError as exc:
                last = exc
                if not exc.retryable or attempt == attempts - 1:
                    break
                self._sleep(backoff_delay(attempt, self._rng))
        assert last is not None
        err = BackendError(last.status, last.detail)
        err.attempts = attempted
        raise err
