"""Cross-package contract: the summarization pipeline talks to this service.

The pipeline package is imported here only to drive its two external
interfaces from the consumer side: the HTTP wire format
{"input"} -> {"summary"} and the export-train JSONL pair format. The
harness library itself never imports the pipeline.
"""

from __future__ import annotations

import json
from pathlib import Path

from transformers import AutoTokenizer

from longdial.condenser import MockLLM, condense_dialogue, enrich
from longdial.corpus import load_corpus
from longdial.embedder import HashEmbedder
from longdial.pipeline import default_config, export_training_file, run_pipeline
from longdial.segmenter import segment_dialogue
from longdial.splitter import split_dialogue
from longdial.summarizer import HttpModelSummarizer

from finetune_harness.data import load_pairs
from finetune_harness.serve import make_app

FIXTURE_CORPUS = (
    Path(__file__).resolve().parents[2] / "tests" / "data" / "fixture_corpus.jsonl"
)


def _enriched_inputs():
    """Twenty pipeline inputs: five fixture dialogues at four lead depths."""
    corpus = load_corpus(FIXTURE_CORPUS)
    embedder = HashEmbedder(dim=256)
    backend = MockLLM(lines_kept=2)
    enriched = []
    for dialogue in corpus:
        segmentation = segment_dialogue(dialogue, embedder, w=1, l=3)
        plan = split_dialogue(dialogue, list(segmentation.breakpoints), 5)
        condensation = condense_dialogue(dialogue, plan, backend)
        for k in (0, 1, 3, 5):
            enriched.append(enrich(dialogue, condensation, k))
    return enriched


def test_echo_service_round_trips_pipeline_inputs(criterion, serve_app):
    with criterion(
        "SECONDARY",
        "echo service round-trips twenty pipeline inputs byte-identically",
    ):
        inputs = _enriched_inputs()
        assert len(inputs) == 20
        url = serve_app(make_app(mode="echo"))
        client = HttpModelSummarizer(f"{url}/summarize")
        for enriched in inputs:
            summary = client.summarize(enriched)
            assert summary == enriched.text
            assert summary.encode("utf-8") == enriched.text.encode("utf-8")


def test_model_service_summarizes_pipeline_inputs(
    criterion, serve_app, trained_model_dir
):
    with criterion(
        "SECONDARY",
        "trained toy checkpoint answers every pipeline input within the token cap",
    ):
        cap = 32
        url = serve_app(
            make_app(
                checkpoint=str(trained_model_dir), mode="model", max_new_tokens=cap
            )
        )
        client = HttpModelSummarizer(f"{url}/summarize", timeout=120.0)
        tokenizer = AutoTokenizer.from_pretrained(trained_model_dir)
        for enriched in _enriched_inputs():
            summary = client.summarize(enriched)
            assert summary != "", enriched.dialogue_id
            assert len(tokenizer(summary)["input_ids"]) <= cap


def test_exported_pairs_feed_the_loader(criterion, tmp_path):
    with criterion(
        "SECONDARY", "export-train output loads as training pairs unchanged"
    ):
        config = default_config()
        config.update(
            corpus_path=str(FIXTURE_CORPUS),
            output_dir=str(tmp_path / "out"),
            method="greedy",
            w=1,
            l=3,
            M=5,
            k=2,
            embedder={"kind": "mock-hash", "dim": 256},
            llm={"kind": "mock", "lines_kept": 2},
            summarizer={"mode": "passthrough"},
        )
        run_pipeline(config, stages=["segment", "split", "condense", "enrich"])
        pairs_path = tmp_path / "pairs.jsonl"
        count = export_training_file(config, pairs_path)
        assert count == 5

        pairs = load_pairs(pairs_path)
        assert [pair.id for pair in pairs] == [f"fd-000{i}" for i in range(1, 6)]
        corpus = load_corpus(FIXTURE_CORPUS)
        for pair in pairs:
            artifact = json.loads(
                (tmp_path / "out" / "enrich" / f"{pair.id}.json").read_text(
                    encoding="utf-8"
                )
            )
            assert pair.input == artifact["text"]
            assert pair.target == corpus.get(pair.id).gold_summary
            assert pair.partition == corpus.get(pair.id).partition
        train_only = load_pairs(pairs_path, partitions=["train"])
        assert len(train_only) == 3
