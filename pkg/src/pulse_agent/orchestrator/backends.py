"""Pluggable LLM text-completion backends.

The scripted mock keys canned responses by SHA-256 of a whitespace-normalized
prompt, so agent behavior is fully deterministic and testable offline. The
remote backend speaks the common chat-completion JSON convention.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import BackendTimeout, BackendUnavailable

API_KEY_ENV = "PULSE_AGENT_LLM_KEY"


def prompt_fingerprint(prompt: str) -> str:
    normalized = " ".join(prompt.split())
    return hashlib.sha256(normalized.encode()).hexdigest()


class LlmBackend(Protocol):
    def complete(self, prompt: str) -> str: ...


class MockBackend:
    """Deterministic fixture-driven backend for CI and demos."""

    def __init__(self, transcript: dict[str, str] | None = None):
        self._responses: dict[str, str] = dict(transcript or {})

    def register(self, prompt: str, response: str) -> None:
        self._responses[prompt_fingerprint(prompt)] = response

    def complete(self, prompt: str) -> str:
        fp = prompt_fingerprint(prompt)
        if fp not in self._responses:
            raise BackendUnavailable(f"no scripted response for prompt fingerprint {fp[:12]}")
        return self._responses[fp]

    @classmethod
    def from_transcript(cls, path: str | Path) -> "MockBackend":
        """Load a fixture transcript: JSON array of {prompt_fingerprint, response}."""
        items = json.loads(Path(path).read_text())
        return cls({item["prompt_fingerprint"]: item["response"] for item in items})

    def save_transcript(self, path: str | Path) -> None:
        items = [{"prompt_fingerprint": fp, "response": r} for fp, r in sorted(self._responses.items())]
        Path(path).write_text(json.dumps(items, indent=2) + "\n")


class RemoteBackend:
    """HTTP chat-completion client; API key from the environment."""

    def __init__(self, endpoint: str, model: str, timeout_s: float = 30.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout_s = timeout_s

    def complete(self, prompt: str) -> str:
        headers = {}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {"model": self.model, "messages": [{"role": "user", "content": prompt}]}
        try:
            resp = httpx.post(self.endpoint, json=body, headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except httpx.TimeoutException as exc:
            raise BackendTimeout(f"backend timed out after {self.timeout_s} s: {exc}") from exc
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise BackendUnavailable(str(exc)) from exc


class RecordingBackend:
    """Wrapper logging every prompt/response; used by prompt-budget tests."""

    def __init__(self, inner: LlmBackend):
        self.inner = inner
        self.prompts: list[str] = []
        self.responses: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        response = self.inner.complete(prompt)
        self.responses.append(response)
        return response
