"""Budget-aware packing of topic segments into model-sized splits.

Segments from the segmenter can exceed what a downstream model accepts, and
can also be far smaller than necessary. Packing walks the dialogue left to
right and extends each split to the furthest segment boundary that still
fits the budget, so splits respect topic boundaries whenever possible and
stay maximal. When not even the nearest boundary fits, the split is cut at
the budget limit regardless of topic structure and the cut position is
recorded as forced.

Budgets are counted in utterances by default; the token unit prices each
utterance at its whitespace token count, and a single utterance that alone
exceeds the token budget becomes its own split rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Dialogue


class SplitError(ValueError):
    """Split parameters or inputs are invalid."""


@dataclass(frozen=True)
class SplitPlan:
    """Packing of utterances 1..n into contiguous splits."""

    n: int
    budget: int
    budget_unit: str
    breakpoints: tuple[int, ...]
    splits: tuple[tuple[int, int], ...]
    forced_cuts: tuple[int, ...]


def _validate_breakpoints(breakpoints: list[int], n: int) -> None:
    previous = 0
    for b in breakpoints:
        if not previous < b <= n - 1:
            raise SplitError(
                f"breakpoints must be strictly increasing within 1..{n - 1}, "
                f"got {breakpoints}"
            )
        previous = b


def plan_splits_with_costs(
    costs: list[int],
    breakpoints: list[int],
    budget: int,
    budget_unit: str,
) -> SplitPlan:
    """Pack utterances with per-utterance costs into budgeted splits.

    Args:
        costs: cost of utterance i at costs[i - 1]; all must be >= 1.
        breakpoints: 1-based segment boundaries (boundary after utterance b).
        budget: maximum total cost per split.
        budget_unit: label recorded in the plan ("utterances" or "tokens").

    Returns:
        A SplitPlan whose splits tile 1..n. Every split ends on a segment
        boundary, at n, or at a forced cut listed in forced_cuts.
    """
    n = len(costs)
    if n < 1:
        raise SplitError("cannot split an empty dialogue")
    if budget < 1:
        raise SplitError(f"budget must be >= 1, got {budget}")
    if any(c < 1 for c in costs):
        raise SplitError("every utterance cost must be >= 1")
    _validate_breakpoints(breakpoints, n)

    # prefix[i] = total cost of utterances 1..i
    prefix = [0]
    for c in costs:
        prefix.append(prefix[-1] + c)
    boundaries = list(breakpoints) + [n]

    splits: list[tuple[int, int]] = []
    forced: list[int] = []
    c = 0
    while c < n:
        end = max(
            (b for b in boundaries if c < b and prefix[b] - prefix[c] <= budget),
            default=None,
        )
        if end is None:
            # No boundary fits: cut at the budget limit, keeping at least
            # one utterance so oversized single utterances still move on.
            end = c + 1
            while end < n and prefix[end + 1] - prefix[c] <= budget:
                end += 1
            if end < n:
                forced.append(end)
        splits.append((c + 1, end))
        c = end
    return SplitPlan(
        n=n,
        budget=budget,
        budget_unit=budget_unit,
        breakpoints=tuple(breakpoints),
        splits=tuple(splits),
        forced_cuts=tuple(forced),
    )


def plan_splits(n: int, breakpoints: list[int], budget: int) -> SplitPlan:
    """Pack n utterances into splits of at most `budget` utterances."""
    return plan_splits_with_costs([1] * n, breakpoints, budget, "utterances")


def render_span(dialogue: Dialogue, start: int, end: int) -> str:
    """Newline-joined rendered utterances start..end (1-based, inclusive)."""
    if not 1 <= start <= end <= len(dialogue):
        raise SplitError(
            f"span ({start}, {end}) out of range for dialogue of length {len(dialogue)}"
        )
    return "\n".join(u.render() for u in dialogue.utterances[start - 1 : end])


def split_dialogue(
    dialogue: Dialogue,
    breakpoints: list[int],
    budget: int,
    budget_unit: str = "utterances",
) -> SplitPlan:
    """Plan splits for a dialogue in either budget unit."""
    if budget_unit == "utterances":
        return plan_splits(len(dialogue), breakpoints, budget)
    if budget_unit == "tokens":
        costs = [max(1, len(u.render().split())) for u in dialogue.utterances]
        return plan_splits_with_costs(costs, breakpoints, budget, "tokens")
    raise SplitError(f"unknown budget unit {budget_unit!r}")
