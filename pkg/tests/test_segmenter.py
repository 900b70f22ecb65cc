"""Topic segmentation: windows, curve, and both selection rules."""

from __future__ import annotations

import random

import numpy as np
import pytest

from oracles import greedy_oracle
from longdial.corpus import Dialogue, Utterance
from longdial.embedder import HashEmbedder
from longdial.segmenter import (
    SegmentationError,
    segment_dialogue,
    segments_from_breakpoints,
    select_breakpoints,
    similarity_curve,
    threshold_breakpoints,
    window_text,
)


def _dialogue(*texts: str) -> Dialogue:
    return Dialogue(
        id="d",
        utterances=tuple(
            Utterance(index=i, text=t, speaker=f"S{i}")
            for i, t in enumerate(texts, start=1)
        ),
    )


def test_window_text_clamps_at_both_ends():
    d = _dialogue("one", "two", "three", "four")
    assert window_text(d, 1) == "S1: one S2: two"
    assert window_text(d, 2) == "S1: one S2: two S3: three"
    assert window_text(d, 3) == "S2: two S3: three S4: four"
    assert window_text(d, 4) == "S3: three S4: four"
    with pytest.raises(SegmentationError):
        window_text(d, 0)
    with pytest.raises(SegmentationError):
        window_text(d, 5)


def test_window_text_single_utterance():
    d = _dialogue("only line")
    assert window_text(d, 1) == "S1: only line"


def test_similarity_curve_length_and_range(fixture_corpus):
    embedder = HashEmbedder(dim=256)
    for dialogue in fixture_corpus:
        curve = similarity_curve(dialogue, embedder)
        assert curve.shape == (len(dialogue) - 1,)
        assert np.all(curve >= -1.0 - 1e-12) and np.all(curve <= 1.0 + 1e-12)


def test_similarity_curve_zero_vector_guard():
    # Punctuation-only utterances with no speakers render to zero token
    # vectors; the cosine for any pair involving one is pinned to 0.0.
    d = Dialogue(
        id="d",
        utterances=tuple(
            Utterance(index=i, text=t, speaker=None)
            for i, t in enumerate(["...", "!!!", "???"], start=1)
        ),
    )
    curve = similarity_curve(d, HashEmbedder(dim=16))
    assert np.array_equal(curve, np.zeros(2))


def test_greedy_hand_trace():
    assert select_breakpoints([0.9, 0.2, 0.8, 0.1, 0.7], w=1, l=3) == [2, 4]


def test_greedy_tie_breaks_leftmost():
    assert select_breakpoints([0.5, 0.5, 0.5], w=0, l=4) == [1, 2, 3]


def test_greedy_protection_exhausts_candidates():
    # w=5 protects everything after one pick, so only one breakpoint
    # appears no matter how many were requested.
    assert select_breakpoints([0.3, 0.2, 0.4, 0.1], w=5, l=5) == [4]


def test_greedy_l1_and_empty_curve():
    assert select_breakpoints([0.1, 0.2], w=1, l=1) == []
    assert select_breakpoints([], w=1, l=4) == []


def test_greedy_parameter_validation():
    with pytest.raises(SegmentationError):
        select_breakpoints([0.5], w=-1, l=2)
    with pytest.raises(SegmentationError):
        select_breakpoints([0.5], w=0, l=0)


def test_greedy_matches_oracle_on_seeded_curves():
    rng = random.Random(112)
    for _ in range(300):
        n = rng.randint(1, 12)
        curve = [round(rng.random(), 3) for _ in range(n)]
        w = rng.randint(0, 4)
        l = rng.randint(1, 6)
        assert select_breakpoints(curve, w=w, l=l) == greedy_oracle(curve, w, l)


def test_threshold_hand_trace():
    assert threshold_breakpoints([1.0, 1.0, -1.0]) == [3]


def test_threshold_constant_curve_yields_nothing():
    # Zero deviation puts the cutoff at the mean; nothing is strictly below.
    assert threshold_breakpoints([0.7, 0.7, 0.7, 0.7]) == []
    assert threshold_breakpoints([]) == []


def test_threshold_uses_population_stddev():
    # mean 0.5, population stddev 0.2500...; values below 0.25 qualify
    curve = [0.2, 0.5, 0.5, 0.8]
    mean = 0.5
    sigma = (sum((v - mean) ** 2 for v in curve) / 4) ** 0.5
    assert threshold_breakpoints(curve) == [
        i + 1 for i, v in enumerate(curve) if v < mean - sigma
    ]
    assert threshold_breakpoints(curve) == [1]


def test_segments_from_breakpoints():
    assert segments_from_breakpoints([2, 4], 5) == [(1, 2), (3, 4), (5, 5)]
    assert segments_from_breakpoints([], 3) == [(1, 3)]
    assert segments_from_breakpoints([], 1) == [(1, 1)]


def test_segments_validation():
    with pytest.raises(SegmentationError):
        segments_from_breakpoints([3], 3)  # breakpoint at n leaves empty tail
    with pytest.raises(SegmentationError):
        segments_from_breakpoints([2, 2], 5)
    with pytest.raises(SegmentationError):
        segments_from_breakpoints([0], 5)
    with pytest.raises(SegmentationError):
        segments_from_breakpoints([], 0)


def test_segments_tile_property():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(1, 30)
        pool = list(range(1, n))
        rng.shuffle(pool)
        breakpoints = sorted(pool[: rng.randint(0, min(5, len(pool)))])
        segments = segments_from_breakpoints(breakpoints, n)
        covered = [i for s, e in segments for i in range(s, e + 1)]
        assert covered == list(range(1, n + 1))
        assert [e for _, e in segments[:-1]] == breakpoints
        assert segments[-1][1] == n


def test_segment_dialogue_end_to_end(fixture_corpus):
    embedder = HashEmbedder(dim=256)
    d = fixture_corpus.get("fd-0001")
    seg = segment_dialogue(d, embedder, w=1, l=3)
    assert seg.dialogue_id == "fd-0001"
    assert seg.n == len(d)
    assert len(seg.breakpoints) <= 2
    assert len(seg.curve) == len(d) - 1
    assert seg.segments[0][0] == 1 and seg.segments[-1][1] == len(d)
    # threshold method also runs and tiles correctly
    seg_t = segment_dialogue(d, embedder, w=1, l=3, method="threshold")
    assert seg_t.segments[-1][1] == len(d)
    with pytest.raises(SegmentationError, match="unknown segmentation method"):
        segment_dialogue(d, embedder, w=1, l=3, method="magic")


def test_single_utterance_dialogue():
    d = _dialogue("just one line")
    seg = segment_dialogue(d, HashEmbedder(dim=16), w=1, l=4)
    assert seg.curve == ()
    assert seg.breakpoints == ()
    assert seg.segments == ((1, 1),)
