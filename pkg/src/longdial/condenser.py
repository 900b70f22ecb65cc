"""LLM condensation of splits and assembly of the enriched model input.

Each split is condensed twice: once into a short summary and once into an
event list. Per-split outputs concatenate (in split order, newline-joined)
into the first-stage summary F and the event list E. The enriched input
for the second-stage model is then E + F + the first k utterances of the
original dialogue, again newline-joined, with empty sections dropped.

Generation goes through a durable content-addressed cache keyed on the
backend identity, the template (text and version), and the exact input, so
reruns are free and byte-stable. Cache files are written atomically.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from ._net import post_json_with_retry
from .corpus import Dialogue, lead
from .splitter import SplitPlan, render_span

logger = logging.getLogger(__name__)


class GenerationError(RuntimeError):
    """An LLM backend failed, or produced unusable output."""


@dataclass(frozen=True)
class PromptTemplate:
    """A named, versioned prompt with exactly one {input} placeholder."""

    name: str
    template: str
    version: str = "1"

    def __post_init__(self) -> None:
        count = self.template.count("{input}")
        if count != 1:
            raise ValueError(
                f"template {self.name!r} must contain exactly one "
                f"{{input}} placeholder, found {count}"
            )

    def render(self, input_text: str) -> str:
        # str.replace, not str.format: dialogue text may contain braces.
        return self.template.replace("{input}", input_text)


DEFAULT_SUMMARY_TEMPLATE = PromptTemplate(
    name="split-summary",
    template=(
        "Summarize the following dialogue segment in 5 sentences or fewer:\n"
        "{input}"
    ),
    version="1",
)

DEFAULT_EVENTS_TEMPLATE = PromptTemplate(
    name="split-events",
    template=(
        "List the events that occur in the following dialogue segment as "
        "short, objective, chronological bullet points:\n"
        "{input}"
    ),
    version="1",
)


class LLMBackend(Protocol):
    identity: str

    def generate(self, prompt: str) -> str:
        """Produce a completion for the prompt."""
        ...


class MockLLM:
    """Deterministic stand-in: echoes the head of the prompt.

    Returns the prompt's first 1 + `lines_kept` non-empty lines, so with
    the instruction on line one the output is the instruction plus the
    body's head. Distinct templates over the same input therefore produce
    distinct outputs, which keeps section-layout bugs downstream visible.
    Output depends only on the prompt, so pipeline artifacts stay
    byte-identical across runs.
    """

    def __init__(self, lines_kept: int = 2) -> None:
        if lines_kept < 1:
            raise ValueError(f"lines_kept must be >= 1, got {lines_kept}")
        self.lines_kept = lines_kept
        self.identity = f"mock:{lines_kept}"
        self.calls = 0

    def generate(self, prompt: str) -> str:
        self.calls += 1
        lines = [line for line in prompt.splitlines() if line.strip()]
        return "\n".join(lines[: 1 + self.lines_kept])


class HttpChatLLM:
    """Client for a chat-completions endpoint.

    POSTs {model, messages, temperature, max_tokens} to
    {api_base}/chat/completions and reads choices[0].message.content.
    Retries on 429 and 5xx with backoff, honoring Retry-After.
    """

    def __init__(
        self,
        api_base: str,
        model: str,
        api_key: str | None = None,
        temperature: float = 0.0,
        max_tokens: int = 512,
        timeout: float = 60.0,
        max_attempts: int = 5,
        session: requests.Session | None = None,
    ) -> None:
        if not api_base or not model:
            raise ValueError("http llm config needs 'api_base' and 'model'")
        self.api_base = api_base.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.identity = f"http:{model}"
        self._session = session or requests.Session()

    def generate(self, prompt: str) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = post_json_with_retry(
            self._session,
            f"{self.api_base}/chat/completions",
            {
                "model": self.model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": self.temperature,
                "max_tokens": self.max_tokens,
            },
            headers=headers or None,
            timeout=self.timeout,
            max_attempts=self.max_attempts,
            error_cls=GenerationError,
        )
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise GenerationError(
                f"{self.api_base}: malformed chat completion response"
            ) from None
        if not isinstance(content, str):
            raise GenerationError(f"{self.api_base}: completion content is not text")
        return content


def build_llm(config: dict) -> LLMBackend:
    """Construct an LLM backend from its config block.

    Recognized kinds: "mock" (options: lines_kept) and "http" (options:
    api_base, model, api_key, temperature, max_tokens, timeout,
    max_attempts). For "http", the LLM_API_BASE, LLM_API_KEY, and
    LLM_MODEL environment variables override their config counterparts.
    """
    kind = config.get("kind", "mock")
    if kind == "mock":
        return MockLLM(lines_kept=int(config.get("lines_kept", 2)))
    if kind == "http":
        return HttpChatLLM(
            api_base=os.environ.get("LLM_API_BASE", config.get("api_base", "")),
            model=os.environ.get("LLM_MODEL", config.get("model", "")),
            api_key=os.environ.get("LLM_API_KEY", config.get("api_key")),
            temperature=float(config.get("temperature", 0.0)),
            max_tokens=int(config.get("max_tokens", 512)),
            timeout=float(config.get("timeout", 60.0)),
            max_attempts=int(config.get("max_attempts", 5)),
        )
    raise ValueError(f"unknown llm kind {kind!r}")


class ResponseCache:
    """Content-addressed response store, one JSON file per key."""

    def __init__(self, cache_dir: str | Path) -> None:
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        # Counters are shared mutable state when the pipeline fans
        # generation out over threads.
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def _count(self, hit: bool) -> None:
        with self._lock:
            if hit:
                self.hits += 1
            else:
                self.misses += 1

    def get(self, key: str) -> str | None:
        path = self._path(key)
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            self._count(hit=False)
            return None
        except (OSError, ValueError) as exc:
            logger.warning("ignoring unreadable cache entry %s: %s", path, exc)
            self._count(hit=False)
            return None
        response = record.get("response")
        if not isinstance(response, str):
            logger.warning("ignoring malformed cache entry %s", path)
            self._count(hit=False)
            return None
        self._count(hit=True)
        return response

    def put(self, key: str, response: str) -> None:
        # Write-then-rename keeps a crashed run from leaving half a file.
        payload = json.dumps(
            {"key": key, "response": response}, ensure_ascii=False, sort_keys=True
        )
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def cache_key(identity: str, template: PromptTemplate, input_text: str) -> str:
    """Stable key over backend identity, template text+version, and input.

    Parts are length-prefixed before hashing so no two distinct tuples can
    collide by concatenation.
    """
    digest = hashlib.sha256()
    for part in (identity, template.version, template.template, input_text):
        raw = part.encode("utf-8")
        digest.update(str(len(raw)).encode("ascii"))
        digest.update(b":")
        digest.update(raw)
    return digest.hexdigest()


def condense_split(
    text: str,
    template: PromptTemplate,
    backend: LLMBackend,
    cache: ResponseCache | None = None,
) -> str:
    """Condense one split's text through a template, via the cache."""
    key = cache_key(backend.identity, template, text) if cache else None
    if cache and key:
        cached = cache.get(key)
        if cached is not None:
            return cached
    output = backend.generate(template.render(text)).strip()
    if not output:
        raise GenerationError(
            f"backend {backend.identity!r} returned empty output for "
            f"template {template.name!r}"
        )
    if cache and key:
        cache.put(key, output)
    return output


@dataclass(frozen=True)
class SplitCondensation:
    start: int
    end: int
    summary: str
    events: str


@dataclass(frozen=True)
class Condensation:
    """Per-split condensations plus their dialogue-level concatenations."""

    dialogue_id: str
    splits: tuple[SplitCondensation, ...]
    first_stage_summary: str
    event_list: str


def condense_dialogue(
    dialogue: Dialogue,
    plan: SplitPlan,
    backend: LLMBackend,
    cache: ResponseCache | None = None,
    summary_template: PromptTemplate = DEFAULT_SUMMARY_TEMPLATE,
    events_template: PromptTemplate = DEFAULT_EVENTS_TEMPLATE,
) -> Condensation:
    """Condense every split of a dialogue and concatenate the results."""
    per_split = []
    for start, end in plan.splits:
        text = render_span(dialogue, start, end)
        per_split.append(
            SplitCondensation(
                start=start,
                end=end,
                summary=condense_split(text, summary_template, backend, cache),
                events=condense_split(text, events_template, backend, cache),
            )
        )
    return Condensation(
        dialogue_id=dialogue.id,
        splits=tuple(per_split),
        first_stage_summary="\n".join(s.summary for s in per_split),
        event_list="\n".join(s.events for s in per_split),
    )


@dataclass(frozen=True)
class EnrichedInput:
    """Second-stage model input: events, summary, then the dialogue head."""

    dialogue_id: str
    k: int
    event_list: str
    first_stage_summary: str
    lead_text: str
    text: str

    def __post_init__(self) -> None:
        sections = [self.event_list, self.first_stage_summary, self.lead_text]
        present = [s for s in sections if s]
        expected = sum(len(s) for s in present) + max(0, len(present) - 1)
        if len(self.text) != expected:
            raise ValueError(
                f"enriched text for {self.dialogue_id!r} does not match its "
                f"sections: {len(self.text)} chars, expected {expected}"
            )


def enrich(dialogue: Dialogue, condensation: Condensation, k: int) -> EnrichedInput:
    """Assemble E + F + lead(k) into one newline-joined input.

    k = 0 drops the lead section, leaving events + summary only.
    """
    lead_text = "\n".join(u.render() for u in lead(k, dialogue))
    sections = [condensation.event_list, condensation.first_stage_summary, lead_text]
    return EnrichedInput(
        dialogue_id=dialogue.id,
        k=k,
        event_list=condensation.event_list,
        first_stage_summary=condensation.first_stage_summary,
        lead_text=lead_text,
        text="\n".join(s for s in sections if s),
    )
