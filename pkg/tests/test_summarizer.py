"""Second-stage summarizer modes (HTTP mode is covered with live servers
in test_http_backends)."""

from __future__ import annotations

import pytest

from longdial.condenser import EnrichedInput, MockLLM, ResponseCache, condense_dialogue, enrich
from longdial.splitter import split_dialogue
from longdial.summarizer import (
    DEFAULT_FINAL_TEMPLATE,
    HttpModelSummarizer,
    LLMSummarizer,
    PassthroughSummarizer,
    build_summarizer,
)


def _enriched(fixture_corpus, dialogue_id="fd-0002", k=2) -> EnrichedInput:
    d = fixture_corpus.get(dialogue_id)
    plan = split_dialogue(d, [5], 5)
    return enrich(d, condense_dialogue(d, plan, MockLLM()), k=k)


def test_passthrough_recovers_first_stage_summary(fixture_corpus):
    enriched = _enriched(fixture_corpus)
    assert PassthroughSummarizer().summarize(enriched) == enriched.first_stage_summary


def test_passthrough_with_empty_events_section():
    # No events section: the summary starts at offset zero.
    enriched = EnrichedInput(
        dialogue_id="d",
        k=0,
        event_list="",
        first_stage_summary="the summary",
        lead_text="",
        text="the summary",
    )
    assert PassthroughSummarizer().summarize(enriched) == "the summary"


def test_passthrough_slicing_is_offset_correct(fixture_corpus):
    # The mock makes E and F distinct, so slicing the wrong section would
    # surface here as a mismatched string.
    enriched = _enriched(fixture_corpus)
    assert enriched.event_list != enriched.first_stage_summary
    out = PassthroughSummarizer().summarize(enriched)
    assert out == enriched.first_stage_summary
    assert out != enriched.event_list


def test_llm_summarizer_prompts_backend_with_enriched_text(fixture_corpus, tmp_path):
    enriched = _enriched(fixture_corpus)
    backend = MockLLM(lines_kept=1)
    cache = ResponseCache(tmp_path)
    out = LLMSummarizer(backend, cache).summarize(enriched)
    expected = backend.generate(DEFAULT_FINAL_TEMPLATE.render(enriched.text))
    assert out == expected
    # Cached on repeat.
    calls = backend.calls
    assert LLMSummarizer(backend, cache).summarize(enriched) == out
    assert backend.calls == calls


def test_build_summarizer_modes():
    assert isinstance(build_summarizer({}), PassthroughSummarizer)
    assert isinstance(
        build_summarizer({"mode": "llm"}, llm_backend=MockLLM()), LLMSummarizer
    )
    http = build_summarizer({"mode": "http-model", "url": "http://localhost:1/s"})
    assert isinstance(http, HttpModelSummarizer)
    with pytest.raises(ValueError, match="needs an LLM backend"):
        build_summarizer({"mode": "llm"})
    with pytest.raises(ValueError, match="needs a 'url'"):
        build_summarizer({"mode": "http-model"})
    with pytest.raises(ValueError, match="unknown summarizer mode"):
        build_summarizer({"mode": "telepathy"})
