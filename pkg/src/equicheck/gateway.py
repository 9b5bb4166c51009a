"""Single chokepoint for model access.

Every request/response pair is appended to the run log as
``llm/<seq>.json``; a replay backend serves those records back so a whole
run can be reproduced byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import BudgetExceeded, IncompleteLog, MalformedOutput, TransportError

API_KEY_ENV = "EQUICHECK_API_KEY"
API_URL_ENV = "EQUICHECK_API_URL"

_JSON_REPAIR_SUFFIX = (
    "\n\nYour previous reply was not valid JSON or was missing required "
    "fields. Respond again with ONLY a single JSON object containing the "
    "required keys: {keys}."
)


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    user_text: str
    system_text: Optional[str] = None
    max_output_tokens: int = 4096
    temperature: float = 0.0

    def __post_init__(self):
        if not self.user_text:
            raise ValueError("user_text must be non-empty")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")

    def digest(self) -> str:
        payload = json.dumps(
            {
                "model_id": self.model_id,
                "system_text": self.system_text,
                "user_text": self.user_text,
                "max_output_tokens": self.max_output_tokens,
                "temperature": self.temperature,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "system_text": self.system_text,
            "user_text": self.user_text,
            "max_output_tokens": self.max_output_tokens,
            "temperature": self.temperature,
        }


@dataclass(frozen=True)
class ChatResponse:
    text: str
    input_tokens: int = 0
    output_tokens: int = 0
    latency_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "input_tokens": self.input_tokens,
            "output_tokens": self.output_tokens,
            "latency_ms": self.latency_ms,
        }


def _estimate_tokens(text: str) -> int:
    return max(1, len(text) // 4)


class MockBackend:
    """Scripted backend: (substring, response-or-list) rules checked in order,
    with an optional default. List values are consumed one call at a time so
    retry paths can be scripted."""

    kind = "mock"

    def __init__(self, rules=None, default: Optional[str] = None):
        self._rules = [(k, list(v) if isinstance(v, list) else [v]) for k, v in (rules or [])]
        self._default = default
        self._lock = threading.Lock()

    def complete(self, req: ChatRequest) -> ChatResponse:
        haystack = (req.system_text or "") + "\n" + req.user_text
        with self._lock:
            for needle, responses in self._rules:
                if needle in haystack:
                    text = responses.pop(0) if len(responses) > 1 else responses[0]
                    return self._respond(req, text)
            if self._default is not None:
                return self._respond(req, self._default)
        raise TransportError("mock backend has no response scripted for this request")

    def _respond(self, req: ChatRequest, text: str) -> ChatResponse:
        return ChatResponse(
            text=text,
            input_tokens=_estimate_tokens(req.user_text),
            output_tokens=_estimate_tokens(text),
            latency_ms=0,
        )


class ReplayBackend:
    """Serves recorded responses from a previous run's ``llm/`` directory,
    matched by request hash in recording order. Unseen requests fail loudly."""

    kind = "replay"

    def __init__(self, llm_dir: Path):
        self._records: dict[str, list[dict]] = {}
        self._lock = threading.Lock()
        llm_dir = Path(llm_dir)
        if not llm_dir.is_dir():
            raise IncompleteLog(f"no llm log directory at {llm_dir}")
        for path in sorted(llm_dir.glob("*.json")):
            record = json.loads(path.read_text())
            self._records.setdefault(record["request_hash"], []).append(record)

    def complete(self, req: ChatRequest) -> ChatResponse:
        with self._lock:
            queue = self._records.get(req.digest())
            if not queue:
                raise IncompleteLog(
                    "replay backend has no recorded response for this request"
                )
            record = queue.pop(0)
        return ChatResponse(**record["response"])


class HttpBackend:
    """OpenAI-style chat completion over HTTP. Credentials come from the
    environment; never from config files."""

    kind = "remote"

    def __init__(self, url: Optional[str] = None, api_key: Optional[str] = None,
                 timeout_s: float = 120.0):
        self._url = url or os.environ.get(API_URL_ENV, "")
        self._api_key = api_key or os.environ.get(API_KEY_ENV, "")
        self._timeout_s = timeout_s
        if not self._url:
            raise TransportError(f"remote backend needs {API_URL_ENV} set")

    def complete(self, req: ChatRequest) -> ChatResponse:
        import httpx

        messages = []
        if req.system_text:
            messages.append({"role": "system", "content": req.system_text})
        messages.append({"role": "user", "content": req.user_text})
        started = time.monotonic()
        try:
            resp = httpx.post(
                self._url,
                headers={"Authorization": f"Bearer {self._api_key}"},
                json={
                    "model": req.model_id,
                    "messages": messages,
                    "max_tokens": req.max_output_tokens,
                    "temperature": req.temperature,
                },
                timeout=self._timeout_s,
            )
            resp.raise_for_status()
        except Exception as exc:
            raise TransportError(str(exc))
        body = resp.json()
        usage = body.get("usage", {})
        return ChatResponse(
            text=body["choices"][0]["message"]["content"],
            input_tokens=usage.get("prompt_tokens", 0),
            output_tokens=usage.get("completion_tokens", 0),
            latency_ms=int((time.monotonic() - started) * 1000),
        )


class RunLog:
    """Append-only run log; the writer lock serializes concurrent analyzers."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.llm_dir = self.root / "llm"
        self.llm_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._seq = len(list(self.llm_dir.glob("*.json")))
        self._events: list[str] = []

    def append_llm(self, req: ChatRequest, resp: ChatResponse) -> int:
        with self._lock:
            seq = self._seq
            self._seq += 1
        record = {
            "seq": seq,
            "request_hash": req.digest(),
            "request": req.to_dict(),
            "response": resp.to_dict(),
        }
        path = self.llm_dir / f"{seq:04d}.json"
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
        return seq

    def event(self, message: str) -> None:
        with self._lock:
            self._events.append(message)
            with open(self.root / "events.log", "a") as fh:
                fh.write(message + "\n")

    @property
    def events(self) -> list[str]:
        return list(self._events)


@dataclass
class Usage:
    calls: int = 0
    input_tokens: int = 0
    output_tokens: int = 0
    latency_ms: int = 0

    def add(self, resp: ChatResponse) -> None:
        self.calls += 1
        self.input_tokens += resp.input_tokens
        self.output_tokens += resp.output_tokens
        self.latency_ms += resp.latency_ms

    def to_dict(self) -> dict:
        return {
            "calls": self.calls,
            "input_tokens": self.input_tokens,
            "output_tokens": self.output_tokens,
            "latency_ms": self.latency_ms,
        }


class Gateway:
    def __init__(self, backend, run_log: Optional[RunLog] = None,
                 max_retries: int = 3, token_ceiling: Optional[int] = None,
                 backoff_s: float = 0.5):
        self.backend = backend
        self.run_log = run_log
        self.max_retries = max_retries
        self.token_ceiling = token_ceiling
        self.backoff_s = backoff_s
        self.usage = Usage()
        self._lock = threading.Lock()

    def complete(self, req: ChatRequest, usage: Optional[Usage] = None) -> ChatResponse:
        with self._lock:
            if (
                self.token_ceiling is not None
                and self.usage.input_tokens + self.usage.output_tokens
                >= self.token_ceiling
            ):
                raise BudgetExceeded(
                    f"token ceiling of {self.token_ceiling} reached"
                )
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries):
            try:
                resp = self.backend.complete(req)
                break
            except IncompleteLog:
                raise
            except TransportError as exc:
                last_error = exc
                if attempt < self.max_retries - 1:
                    time.sleep(self.backoff_s * (2**attempt))
        else:
            raise TransportError(f"transport failed after {self.max_retries} attempts: {last_error}")
        with self._lock:
            self.usage.add(resp)
        if usage is not None:
            usage.add(resp)
        if self.run_log is not None:
            self.run_log.append_llm(req, resp)
        return resp

    def complete_json(self, req: ChatRequest, required_keys: list[str],
                      usage: Optional[Usage] = None) -> dict:
        resp = self.complete(req, usage)
        obj = extract_json_object(resp.text)
        if obj is not None and all(k in obj for k in required_keys):
            return obj
        repair = ChatRequest(
            model_id=req.model_id,
            system_text=req.system_text,
            user_text=req.user_text
            + _JSON_REPAIR_SUFFIX.format(keys=", ".join(required_keys)),
            max_output_tokens=req.max_output_tokens,
            temperature=req.temperature,
        )
        resp = self.complete(repair, usage)
        obj = extract_json_object(resp.text)
        if obj is not None and all(k in obj for k in required_keys):
            return obj
        raise MalformedOutput(
            f"model output lacked a JSON object with keys {required_keys}"
        )


def extract_json_object(text: str):
    """First parseable JSON object embedded anywhere in `text`, or None."""
    for start, ch in enumerate(text):
        if ch != "{":
            continue
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            c = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif c == "\\":
                    escaped = True
                elif c == '"':
                    in_string = False
                continue
            if c == '"':
                in_string = True
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(text[start : i + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
    return None
