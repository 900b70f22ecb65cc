"""Shared fixtures for the pipeline test suite."""

from __future__ import annotations

from pathlib import Path

import pytest

from longdial.corpus import Corpus, load_corpus
from longdial.pipeline import default_config

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus.jsonl"
GOLDEN_REPORT = DATA_DIR / "golden_report.json"


@pytest.fixture(scope="session")
def fixture_corpus_path() -> Path:
    return FIXTURE_CORPUS


@pytest.fixture(scope="session")
def fixture_corpus() -> Corpus:
    return load_corpus(FIXTURE_CORPUS)


@pytest.fixture
def make_config(tmp_path):
    """Factory for the pinned test config over the fixture corpus.

    The parameter choices are deliberate: M=5 forces budget cuts on two of
    the five dialogues, so golden artifacts exercise the fallback path.
    """

    def build(**overrides) -> dict:
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
        config.update(overrides)
        return config

    return build
