"""Single choke point for model calls: live chat-completions endpoint or scripted mock.

Every call is logged as an LLMInvocation with its stage and graph context; the log
is append-only and totally ordered by a monotonic sequence number, so a mock-mode
pipeline replay produces an identical (stage, target_refs, response_text) sequence.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .config import PipelineConfig
from .errors import (
    ConfigurationError,
    EndpointError,
    MockScriptError,
    ParameterError,
    TransportError,
    UnscriptedCallError,
)
from .models import ChatRequest, InvocationContext, LLMInvocation
from .textutil import count_tokens, normalize_text


class MockScript:
    """Scripted responses: first entry whose (stage, substrings) match wins."""

    def __init__(self, entries: list[dict]):
        self.entries = entries

    @classmethod
    def load(cls, path: str | Path) -> "MockScript":
        p = Path(path)
        if not p.exists():
            raise MockScriptError(f"mock script not found: {p}")
        entries: list[dict] = []
        for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MockScriptError(
                    f"mock script parse failure at line {lineno}: {exc.msg}", line_number=lineno
                ) from exc
            for key in ("stage", "match_substrings", "response"):
                if key not in obj:
                    raise MockScriptError(
                        f"mock script entry at line {lineno} lacks {key!r}", line_number=lineno
                    )
            entries.append(obj)
        return cls(entries)

    def match(self, stage: str, prompt: str) -> Optional[str]:
        for entry in self.entries:
            if entry["stage"] != stage:
                continue
            if all(sub in prompt for sub in entry["match_substrings"]):
                return entry["response"]
        return None


class LLMGateway:
    """Routes chat and embedding requests to a live endpoint or a deterministic mock."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self._script: Optional[MockScript] = None
        self._log: list[LLMInvocation] = []
        self._seq = 0
        self._lock = threading.Lock()
        if config.mock_script:
            self.load_mock_script(config.mock_script)

    # -- script ------------------------------------------------------------

    def load_mock_script(self, path: str | Path) -> MockScript:
        self._script = MockScript.load(path)
        return self._script

    @property
    def mock_mode(self) -> bool:
        return self._script is not None or not self.config.endpoint_url

    # -- invocation log ------------------------------------------------------

    @property
    def invocations(self) -> list[LLMInvocation]:
        with self._lock:
            return list(self._log)

    def resume_sequence(self, existing: list[LLMInvocation]) -> None:
        """Continue numbering after a loaded log so ids never collide."""
        max_seq = 0
        for inv in existing:
            tail = inv.id.rsplit("-", 1)[-1]
            if tail.isdigit():
                max_seq = max(max_seq, int(tail))
        with self._lock:
            self._seq = max(self._seq, max_seq)

    def _append_invocation(
        self, context: InvocationContext, request: ChatRequest, response_text: str
    ) -> LLMInvocation:
        with self._lock:
            self._seq += 1
            inv = LLMInvocation(
                id=f"inv-{self._seq:06d}",
                context=InvocationContext(
                    stage=context.stage, target_refs=list(context.target_refs)
                ),
                request=request,
                response_text=response_text,
                model_name=self.config.model_name,
                timestamp=datetime.now(timezone.utc).isoformat(),
                prompt_tokens=count_tokens(request.prompt_text()),
                completion_tokens=count_tokens(response_text),
            )
            self._log.append(inv)
            return inv

    # -- chat ---------------------------------------------------------------

    def complete(self, request: ChatRequest, context: InvocationContext) -> tuple[str, str]:
        """Run one chat call; returns (response_text, invocation_id)."""
        request.validate()
        context.validate()
        if self.mock_mode:
            if self._script is None:
                raise ConfigurationError("mock mode requires a loaded mock script")
            prompt = request.prompt_text()
            response = self._script.match(context.stage, prompt)
            if response is None:
                raise UnscriptedCallError(context.stage, prompt)
        else:
            response = self._complete_live(request)
        inv = self._append_invocation(context, request, response)
        return response, inv.id

    def _complete_live(self, request: ChatRequest) -> str:
        import httpx

        payload = {
            "model": self.config.model_name,
            "messages": [{"role": role, "content": text} for role, text in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        url = self.config.endpoint_url.rstrip("/") + "/chat/completions"
        body = self._post_with_retries(url, payload, headers)
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise EndpointError(200, f"malformed completion body: {body!r}") from exc

    def _post_with_retries(self, url: str, payload: dict, headers: dict) -> dict:
        import httpx

        attempts = self.config.retry_attempts
        last_exc: Exception | None = None
        for attempt in range(attempts):
            try:
                resp = httpx.post(url, json=payload, headers=headers, timeout=60.0)
            except httpx.TransportError as exc:
                last_exc = exc
                if attempt < attempts - 1:
                    time.sleep(self.config.retry_base_seconds * (2**attempt))
                continue
            if resp.status_code // 100 != 2:
                # A real answer from the server is surfaced, never retried.
                raise EndpointError(resp.status_code, resp.text)
            return resp.json()
        raise TransportError(f"endpoint unreachable: {last_exc}", attempts=attempts)

    # -- embeddings -----------------------------------------------------------

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        """One unit vector per text; mock vectors derive from a hash of the normalized text."""
        if not texts:
            raise ParameterError("texts must be non-empty")
        for t in texts:
            if not t.strip():
                raise ParameterError("each text must be non-empty after trimming")
        if self.mock_mode:
            return [self._mock_embedding(t) for t in texts]
        return self._embed_live(texts)

    def _mock_embedding(self, text: str) -> np.ndarray:
        digest = hashlib.sha256(normalize_text(text).encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "big")
        rng = np.random.default_rng(seed)
        vec = rng.standard_normal(self.config.embed_dim)
        return vec / np.linalg.norm(vec)

    def _embed_live(self, texts: list[str]) -> list[np.ndarray]:
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        url = self.config.endpoint_url.rstrip("/") + "/embeddings"
        payload = {"model": self.config.embed_model_name, "input": texts}
        body = self._post_with_retries(url, payload, headers)
        vectors = []
        for item in body.get("data", []):
            vec = np.asarray(item["embedding"], dtype=float)
            if vec.shape != (self.config.embed_dim,):
                raise ConfigurationError(
                    f"endpoint returned dimension {vec.shape[0]}, "
                    f"configured embed_dim is {self.config.embed_dim}"
                )
            norm = np.linalg.norm(vec)
            vectors.append(vec / norm if norm else vec)
        if len(vectors) != len(texts):
            raise ConfigurationError("endpoint returned wrong number of embeddings")
        return vectors
