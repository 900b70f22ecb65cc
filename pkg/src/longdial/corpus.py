"""Dialogue corpora: loading, validation, addressing, and the lead-k primitive.

A corpus is a JSONL file with one dialogue per line:

    {"id": str, "partition": "train"|"validation"|"test",
     "utterances": [{"speaker": str|null, "text": str}, ...],
     "summary": str|null}

Everything downstream renders an utterance as ``speaker: text`` when a
speaker label is present, else the bare text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

PARTITIONS = ("train", "validation", "test")


class CorpusError(ValueError):
    """A corpus file or dialogue record violates the expected schema."""


@dataclass(frozen=True)
class Utterance:
    """One transcript line; `index` is its 1-based position in the dialogue."""

    index: int
    text: str
    speaker: str | None = None

    def __post_init__(self) -> None:
        if self.index < 1:
            raise CorpusError(f"utterance index must be >= 1, got {self.index}")
        if not self.text or not self.text.strip():
            raise CorpusError(f"utterance {self.index} has no non-whitespace text")

    def render(self) -> str:
        """Line form used by every downstream text operation."""
        if self.speaker:
            return f"{self.speaker}: {self.text}"
        return self.text


@dataclass(frozen=True)
class Dialogue:
    """An ordered, validated sequence of utterances plus optional gold summary."""

    id: str
    utterances: tuple[Utterance, ...]
    gold_summary: str | None = None
    partition: str = "train"

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("dialogue id must be non-empty")
        if self.partition not in PARTITIONS:
            raise CorpusError(
                f"dialogue {self.id!r}: unknown partition {self.partition!r} "
                f"(expected one of {', '.join(PARTITIONS)})"
            )
        if not self.utterances:
            raise CorpusError(f"dialogue {self.id!r} has an empty utterances list")
        for position, utt in enumerate(self.utterances, start=1):
            if utt.index != position:
                raise CorpusError(
                    f"dialogue {self.id!r}: utterance at position {position} "
                    f"carries index {utt.index}"
                )

    def __len__(self) -> int:
        return len(self.utterances)

    def render(self) -> str:
        """Whole dialogue as newline-joined rendered utterances."""
        return "\n".join(u.render() for u in self.utterances)


@dataclass(frozen=True)
class Corpus:
    """A set of dialogues with unique ids."""

    dialogues: tuple[Dialogue, ...]
    _by_id: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        for dialogue in self.dialogues:
            if dialogue.id in self._by_id:
                raise CorpusError(f"duplicate dialogue id {dialogue.id!r}")
            self._by_id[dialogue.id] = dialogue

    def __len__(self) -> int:
        return len(self.dialogues)

    def __iter__(self) -> Iterator[Dialogue]:
        return iter(self.dialogues)

    def get(self, dialogue_id: str) -> Dialogue:
        try:
            return self._by_id[dialogue_id]
        except KeyError:
            raise KeyError(f"no dialogue with id {dialogue_id!r}") from None

    @property
    def partition_counts(self) -> dict[str, int]:
        counts = {p: 0 for p in PARTITIONS}
        for dialogue in self.dialogues:
            counts[dialogue.partition] += 1
        return counts

    def partition(self, name: str) -> list[Dialogue]:
        """Dialogues belonging to one partition, in corpus order."""
        if name not in PARTITIONS:
            raise CorpusError(f"unknown partition {name!r}")
        return [d for d in self.dialogues if d.partition == name]


def _dialogue_from_record(record: object, line_number: int) -> Dialogue:
    if not isinstance(record, dict):
        raise CorpusError(f"line {line_number}: record is not a JSON object")
    dialogue_id = record.get("id")
    label = f"line {line_number} (id={dialogue_id!r})"
    if not isinstance(dialogue_id, str) or not dialogue_id:
        raise CorpusError(f"{label}: missing or empty 'id'")
    raw_utterances = record.get("utterances")
    if not isinstance(raw_utterances, list) or not raw_utterances:
        raise CorpusError(f"{label}: 'utterances' must be a non-empty list")
    utterances = []
    for position, raw in enumerate(raw_utterances, start=1):
        if not isinstance(raw, dict) or not isinstance(raw.get("text"), str):
            raise CorpusError(f"{label}: utterance {position} needs a string 'text'")
        speaker = raw.get("speaker")
        if speaker is not None and not isinstance(speaker, str):
            raise CorpusError(f"{label}: utterance {position} speaker must be string or null")
        try:
            utterances.append(Utterance(index=position, text=raw["text"], speaker=speaker))
        except CorpusError as exc:
            raise CorpusError(f"{label}: {exc}") from None
    summary = record.get("summary")
    if summary is not None and not isinstance(summary, str):
        raise CorpusError(f"{label}: 'summary' must be string or null")
    try:
        return Dialogue(
            id=dialogue_id,
            utterances=tuple(utterances),
            gold_summary=summary,
            partition=record.get("partition", "train"),
        )
    except CorpusError as exc:
        raise CorpusError(f"{label}: {exc}") from None


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load and validate a JSONL corpus.

    Raises CorpusError naming the offending line and dialogue id for any
    malformed record; an empty file is an error as well.
    """
    if format != "jsonl":
        raise CorpusError(f"unsupported corpus format {format!r}")
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc

    dialogues = []
    for line_number, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {line_number}: invalid JSON: {exc}") from None
        dialogues.append(_dialogue_from_record(record, line_number))
    if not dialogues:
        raise CorpusError(f"empty corpus: {path}")
    return Corpus(dialogues=tuple(dialogues))


def dialogue_to_record(dialogue: Dialogue) -> dict:
    """Inverse of the JSONL record parser; used for round-trip serialization."""
    return {
        "id": dialogue.id,
        "partition": dialogue.partition,
        "utterances": [
            {"speaker": u.speaker, "text": u.text} for u in dialogue.utterances
        ],
        "summary": dialogue.gold_summary,
    }


def dump_corpus(corpus: Corpus, path: str | Path) -> Path:
    """Write a corpus back to JSONL (UTF-8, LF line endings)."""
    path = Path(path)
    lines = [
        json.dumps(dialogue_to_record(d), ensure_ascii=False) for d in corpus
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def lead(k: int, dialogue: Dialogue) -> list[Utterance]:
    """First min(k, n) utterances of the dialogue, in original order."""
    if k < 0:
        raise ValueError(f"lead count must be non-negative, got {k}")
    return list(dialogue.utterances[:k])
