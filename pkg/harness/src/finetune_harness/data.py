"""Training-pair loading.

Pairs arrive as JSONL, one object per line with the keys "id",
"partition", "input", and "target". That is the file format the
summarization pipeline's export-train command writes, but any producer
of the same shape works. Unknown extra keys are ignored so producers
can add fields without breaking consumers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class DataError(ValueError):
    """A training-pair file is missing, malformed, or empty."""


@dataclass(frozen=True)
class Pair:
    """One supervised example: model input text and its target text."""

    id: str
    partition: str
    input: str
    target: str


_REQUIRED = ("id", "partition", "input", "target")


def load_pairs(
    path: str | Path, partitions: list[str] | tuple[str, ...] | None = None
) -> list[Pair]:
    """Read training pairs from a JSONL file, optionally filtered by partition.

    Raises DataError with a line number on the first malformed record, and
    when the file yields no pairs at all (after filtering).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read pairs file {path}: {exc}") from None
    wanted = set(partitions) if partitions is not None else None
    pairs: list[Pair] = []
    seen: set[str] = set()
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{number}: not valid JSON: {exc}") from None
        if not isinstance(record, dict):
            raise DataError(f"{path}:{number}: expected a JSON object")
        for key in _REQUIRED:
            value = record.get(key)
            if not isinstance(value, str) or not value:
                raise DataError(
                    f"{path}:{number}: field {key!r} must be a non-empty string"
                )
        if record["id"] in seen:
            raise DataError(f"{path}:{number}: duplicate pair id {record['id']!r}")
        seen.add(record["id"])
        if wanted is not None and record["partition"] not in wanted:
            continue
        pairs.append(
            Pair(
                id=record["id"],
                partition=record["partition"],
                input=record["input"],
                target=record["target"],
            )
        )
    if not pairs:
        detail = f" for partitions {sorted(wanted)}" if wanted else ""
        raise DataError(f"{path}: no training pairs{detail}")
    return pairs
