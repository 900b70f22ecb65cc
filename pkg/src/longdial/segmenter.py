"""Unsupervised topic segmentation over a dialogue's utterance sequence.

Each utterance is embedded together with its immediate neighbors, giving a
context window that smooths single-line noise. Cosine similarity between
consecutive windows forms a curve with one value per adjacent pair; local
dips mark topic shifts. Two selection rules turn the curve into breakpoints:

  greedy    repeatedly take the lowest unprotected dip, then protect its
            w-neighborhood on both sides, until l - 1 breakpoints are
            chosen or every position is protected
  threshold keep every dip strictly below mean minus population stddev

A breakpoint b (1-based) means the segment boundary falls after utterance
b, so breakpoints [2, 4] over 5 utterances give segments (1,2) (3,4) (5,5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Dialogue
from .embedder import Embedder


class SegmentationError(ValueError):
    """Segmentation parameters or inputs are invalid."""


def window_text(dialogue: Dialogue, i: int) -> str:
    """Rendered text of utterance i (1-based) with its adjacent neighbors.

    The window is u_{i-1} + u_i + u_{i+1} joined by single spaces, clamped
    at both ends of the dialogue.
    """
    n = len(dialogue)
    if not 1 <= i <= n:
        raise SegmentationError(f"utterance index {i} out of range 1..{n}")
    window = dialogue.utterances[max(i - 2, 0) : i + 1]
    return " ".join(u.render() for u in window)


def similarity_curve(dialogue: Dialogue, embedder: Embedder) -> np.ndarray:
    """Cosine similarity between consecutive windowed embeddings.

    Entry j (0-based) compares the windows of utterances j+1 and j+2, so
    the curve has len(dialogue) - 1 entries. Zero vectors get similarity
    0.0 instead of NaN.
    """
    n = len(dialogue)
    vectors = embedder.encode([window_text(dialogue, i) for i in range(1, n + 1)])
    left, right = vectors[:-1], vectors[1:]
    norms = np.linalg.norm(left, axis=1) * np.linalg.norm(right, axis=1)
    dots = np.einsum("ij,ij->i", left, right)
    return np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)


def select_breakpoints(curve: np.ndarray | list[float], w: int, l: int) -> list[int]:
    """Greedy dip selection with a protection radius.

    Args:
        curve: similarity values, entry j scoring the boundary after
            utterance j+1.
        w: protection radius; choosing position j removes j-w..j+w from
            future consideration.
        l: target number of segments; selection stops at l - 1 breakpoints.

    Returns:
        Sorted 1-based breakpoint positions. Ties on the minimum go to the
        leftmost position, so results are deterministic.
    """
    if w < 0:
        raise SegmentationError(f"protection radius must be >= 0, got {w}")
    if l < 1:
        raise SegmentationError(f"segment target must be >= 1, got {l}")
    values = [float(v) for v in curve]
    available = set(range(len(values)))
    chosen: list[int] = []
    while len(chosen) < l - 1 and available:
        j = min(available, key=lambda idx: (values[idx], idx))
        chosen.append(j)
        available.difference_update(range(j - w, j + w + 1))
    return sorted(j + 1 for j in chosen)


def threshold_breakpoints(curve: np.ndarray | list[float]) -> list[int]:
    """Every position strictly below mean minus population stddev."""
    values = [float(v) for v in curve]
    if not values:
        return []
    mean = sum(values) / len(values)
    variance = sum((v - mean) ** 2 for v in values) / len(values)
    cutoff = mean - variance**0.5
    return [j + 1 for j, v in enumerate(values) if v < cutoff]


def segments_from_breakpoints(breakpoints: list[int], n: int) -> list[tuple[int, int]]:
    """Inclusive 1-based (start, end) spans tiling utterances 1..n."""
    if n < 1:
        raise SegmentationError(f"dialogue length must be >= 1, got {n}")
    previous = 0
    for b in breakpoints:
        if not previous < b <= n - 1:
            raise SegmentationError(
                f"breakpoints must be strictly increasing within 1..{n - 1}, "
                f"got {breakpoints}"
            )
        previous = b
    segments = []
    start = 1
    for b in list(breakpoints) + [n]:
        segments.append((start, b))
        start = b + 1
    return segments


@dataclass(frozen=True)
class Segmentation:
    """Result of segmenting one dialogue."""

    dialogue_id: str
    n: int
    method: str
    w: int
    l: int
    curve: tuple[float, ...]
    breakpoints: tuple[int, ...]
    segments: tuple[tuple[int, int], ...]


def segment_dialogue(
    dialogue: Dialogue,
    embedder: Embedder,
    w: int,
    l: int,
    method: str = "greedy",
) -> Segmentation:
    """Embed, score, and select breakpoints for one dialogue."""
    curve = similarity_curve(dialogue, embedder)
    if method == "greedy":
        breakpoints = select_breakpoints(curve, w=w, l=l)
    elif method == "threshold":
        breakpoints = threshold_breakpoints(curve)
    else:
        raise SegmentationError(f"unknown segmentation method {method!r}")
    segments = segments_from_breakpoints(breakpoints, len(dialogue))
    return Segmentation(
        dialogue_id=dialogue.id,
        n=len(dialogue),
        method=method,
        w=w,
        l=l,
        curve=tuple(float(v) for v in curve),
        breakpoints=tuple(breakpoints),
        segments=tuple(segments),
    )
