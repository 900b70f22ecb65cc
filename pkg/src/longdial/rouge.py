"""Self-contained ROUGE-1, ROUGE-2, and ROUGE-L scoring.

Tokenization lowercases and keeps alphanumeric runs. N-gram overlap is
clipped (a candidate n-gram counts at most as often as it appears in the
reference), ROUGE-L uses the length of the longest common subsequence of
the token lists, and every metric reports precision, recall, and F1.
Aggregation over a corpus is the arithmetic mean of per-pair scores.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .stemmer import stem

_TOKEN_RE = re.compile(r"[a-z0-9]+")

METRICS = ("rouge1", "rouge2", "rougeL")


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f1: float


def tokenize(text: str, stemming: bool = False) -> list[str]:
    """Lowercased alphanumeric tokens, optionally Porter-stemmed."""
    tokens = _TOKEN_RE.findall(text.lower())
    if stemming:
        tokens = [stem(t) for t in tokens]
    return tokens


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _prf(matches: int, candidate_total: int, reference_total: int) -> Score:
    precision = matches / candidate_total if candidate_total else 0.0
    recall = matches / reference_total if reference_total else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return Score(precision=precision, recall=recall, f1=f1)


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> Score:
    """Clipped n-gram overlap between token lists."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    matches = sum(min(count, ref[gram]) for gram, count in cand.items())
    return _prf(matches, sum(cand.values()), sum(ref.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence, O(len(a) * len(b)) time."""
    if not a or not b:
        return 0
    # Two-row DP keeps memory linear in the shorter list.
    if len(b) > len(a):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> Score:
    """LCS-based score over token lists."""
    matches = lcs_length(candidate, reference)
    return _prf(matches, len(candidate), len(reference))


def score(candidate: str, reference: str, stemming: bool = False) -> dict[str, Score]:
    """Score one candidate/reference pair on all three metrics."""
    cand = tokenize(candidate, stemming=stemming)
    ref = tokenize(reference, stemming=stemming)
    return {
        "rouge1": rouge_n(cand, ref, 1),
        "rouge2": rouge_n(cand, ref, 2),
        "rougeL": rouge_l(cand, ref),
    }


def aggregate(pair_scores: Iterable[dict[str, Score]]) -> dict[str, Score]:
    """Arithmetic mean of per-pair scores; empty input is an error."""
    pair_scores = list(pair_scores)
    if not pair_scores:
        raise ValueError("nothing to aggregate: no scored pairs")
    out: dict[str, Score] = {}
    for metric in METRICS:
        out[metric] = Score(
            precision=sum(s[metric].precision for s in pair_scores) / len(pair_scores),
            recall=sum(s[metric].recall for s in pair_scores) / len(pair_scores),
            f1=sum(s[metric].f1 for s in pair_scores) / len(pair_scores),
        )
    return out


def score_to_dict(s: Score) -> dict[str, float]:
    return {"precision": s.precision, "recall": s.recall, "f1": s.f1}
