"""Second-stage summarizers: enriched input in, final summary out.

Three modes. Passthrough slices the first-stage summary back out of the
enriched text, giving a model-free baseline with sensible scores. The llm
mode prompts a chat backend with the enriched text. The http-model mode
calls an external summarization service speaking ``{"input": ...}`` ->
``{"summary": ...}``, which is also the wire format a finetuned model
server is expected to expose.
"""

from __future__ import annotations

from typing import Protocol

import requests

from ._net import post_json_with_retry
from .condenser import (
    EnrichedInput,
    LLMBackend,
    PromptTemplate,
    ResponseCache,
    condense_split,
)


class SummarizationError(RuntimeError):
    """A summarizer backend failed or returned a malformed response."""


DEFAULT_FINAL_TEMPLATE = PromptTemplate(
    name="final-summary",
    template=(
        "Write one coherent summary of the dialogue described by the notes "
        "below:\n{input}"
    ),
    version="1",
)


class Summarizer(Protocol):
    mode: str

    def summarize(self, enriched: EnrichedInput) -> str:
        """Produce the final summary for one enriched input."""
        ...


class PassthroughSummarizer:
    """Returns the first-stage summary section of the enriched text."""

    mode = "passthrough"

    def summarize(self, enriched: EnrichedInput) -> str:
        # Slice by section lengths rather than reading the field directly,
        # so the documented text layout is what actually gets exercised.
        start = len(enriched.event_list) + 1 if enriched.event_list else 0
        return enriched.text[start : start + len(enriched.first_stage_summary)]


class LLMSummarizer:
    """Prompts a chat backend with the enriched text."""

    mode = "llm"

    def __init__(
        self,
        backend: LLMBackend,
        cache: ResponseCache | None = None,
        template: PromptTemplate = DEFAULT_FINAL_TEMPLATE,
    ) -> None:
        self.backend = backend
        self.cache = cache
        self.template = template

    def summarize(self, enriched: EnrichedInput) -> str:
        return condense_split(enriched.text, self.template, self.backend, self.cache)


class HttpModelSummarizer:
    """Client for a summarization service."""

    mode = "http-model"

    def __init__(
        self,
        url: str,
        timeout: float = 60.0,
        max_attempts: int = 5,
        session: requests.Session | None = None,
    ) -> None:
        if not url:
            raise ValueError("summarization service url must be non-empty")
        self.url = url
        self.timeout = timeout
        self.max_attempts = max_attempts
        self._session = session or requests.Session()

    def summarize(self, enriched: EnrichedInput) -> str:
        body = post_json_with_retry(
            self._session,
            self.url,
            {"input": enriched.text},
            timeout=self.timeout,
            max_attempts=self.max_attempts,
            error_cls=SummarizationError,
        )
        summary = body.get("summary")
        if not isinstance(summary, str):
            raise SummarizationError(
                f"{self.url}: response is missing a string 'summary'"
            )
        return summary


def build_summarizer(
    config: dict,
    llm_backend: LLMBackend | None = None,
    cache: ResponseCache | None = None,
) -> Summarizer:
    """Construct a summarizer from its config block.

    Recognized modes: "passthrough", "llm" (requires a backend), and
    "http-model" (options: url, timeout, max_attempts).
    """
    mode = config.get("mode", "passthrough")
    if mode == "passthrough":
        return PassthroughSummarizer()
    if mode == "llm":
        if llm_backend is None:
            raise ValueError("llm summarizer mode needs an LLM backend")
        return LLMSummarizer(backend=llm_backend, cache=cache)
    if mode == "http-model":
        url = config.get("url")
        if not url:
            raise ValueError("http-model summarizer config needs a 'url'")
        return HttpModelSummarizer(
            url=url,
            timeout=float(config.get("timeout", 60.0)),
            max_attempts=int(config.get("max_attempts", 5)),
        )
    raise ValueError(f"unknown summarizer mode {mode!r}")
