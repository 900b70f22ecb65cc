"""Teacher-forced finetuning for sequence-to-sequence checkpoints.

A deliberately small loop: AdamW, fixed learning rate, seeded shuffling,
one forward/backward per batch, loss history recorded per step. The
trained model, its tokenizer, and the loss history are written to the
output directory in the standard checkpoint layout.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

from .data import Pair, load_pairs

logger = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    """Training could not start or produced no usable result."""


@dataclass(frozen=True)
class TrainSettings:
    model_dir: str
    pairs_path: str
    output_dir: str
    epochs: int = 1
    batch_size: int = 2
    learning_rate: float = 1e-3
    max_input_tokens: int = 512
    max_target_tokens: int = 64
    seed: int = 13
    partitions: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("epochs", "batch_size", "max_input_tokens", "max_target_tokens"):
            if getattr(self, name) < 1:
                raise TrainingError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise TrainingError(f"learning_rate must be > 0, got {self.learning_rate}")


@dataclass
class _Batch:
    input_ids: torch.Tensor
    attention_mask: torch.Tensor
    decoder_input_ids: torch.Tensor
    labels: torch.Tensor


def encode_batch(
    tokenizer,
    pairs: list[Pair],
    max_input_tokens: int,
    max_target_tokens: int,
    pad_id: int,
    eos_id: int,
    decoder_start_id: int,
) -> _Batch:
    """Tensors for one teacher-forced step.

    Targets get an explicit end-of-sequence token; the decoder input is the
    target shifted right behind the decoder start token; padded label
    positions are masked out of the loss with -100.
    """
    encoded = tokenizer(
        [pair.input for pair in pairs],
        return_tensors="pt",
        padding=True,
        truncation=True,
        max_length=max_input_tokens,
    )
    targets = tokenizer(
        [pair.target for pair in pairs],
        truncation=True,
        max_length=max(1, max_target_tokens - 1),
    )["input_ids"]
    width = max(len(ids) for ids in targets) + 1
    padded = torch.full((len(targets), width), pad_id, dtype=torch.long)
    for row, ids in enumerate(targets):
        padded[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        padded[row, len(ids)] = eos_id
    decoder_input_ids = torch.full_like(padded, pad_id)
    decoder_input_ids[:, 0] = decoder_start_id
    decoder_input_ids[:, 1:] = padded[:, :-1]
    labels = padded.masked_fill(padded == pad_id, -100)
    return _Batch(
        input_ids=encoded["input_ids"],
        attention_mask=encoded["attention_mask"],
        decoder_input_ids=decoder_input_ids,
        labels=labels,
    )


def _special_ids(model) -> tuple[int, int, int]:
    config = model.config
    pad_id = config.pad_token_id
    eos_id = config.eos_token_id
    start_id = config.decoder_start_token_id
    if start_id is None:
        start_id = eos_id if eos_id is not None else config.bos_token_id
    if pad_id is None or eos_id is None or start_id is None:
        raise TrainingError(
            "checkpoint config must define pad, eos, and decoder start tokens"
        )
    return pad_id, eos_id, start_id


def train(settings: TrainSettings) -> dict:
    """Run the loop and return the loss history that was also saved to disk."""
    pairs = load_pairs(settings.pairs_path, settings.partitions)
    tokenizer = AutoTokenizer.from_pretrained(settings.model_dir)
    model = AutoModelForSeq2SeqLM.from_pretrained(settings.model_dir)
    pad_id, eos_id, start_id = _special_ids(model)

    torch.manual_seed(settings.seed)
    rng = random.Random(settings.seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=settings.learning_rate)
    model.train()

    step_losses: list[float] = []
    epoch_means: list[float] = []
    for epoch in range(settings.epochs):
        order = list(range(len(pairs)))
        rng.shuffle(order)
        epoch_losses: list[float] = []
        for start in range(0, len(order), settings.batch_size):
            batch_pairs = [pairs[i] for i in order[start : start + settings.batch_size]]
            batch = encode_batch(
                tokenizer,
                batch_pairs,
                settings.max_input_tokens,
                settings.max_target_tokens,
                pad_id,
                eos_id,
                start_id,
            )
            output = model(
                input_ids=batch.input_ids,
                attention_mask=batch.attention_mask,
                decoder_input_ids=batch.decoder_input_ids,
                labels=batch.labels,
            )
            output.loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            epoch_losses.append(float(output.loss.detach()))
        step_losses.extend(epoch_losses)
        epoch_means.append(sum(epoch_losses) / len(epoch_losses))
        logger.info("epoch %d/%d: mean loss %.4f", epoch + 1, settings.epochs, epoch_means[-1])

    history = {
        "pairs": len(pairs),
        "steps": len(step_losses),
        "step_losses": step_losses,
        "epoch_means": epoch_means,
        "settings": asdict(settings),
    }
    output_dir = Path(settings.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(output_dir)
    tokenizer.save_pretrained(output_dir)
    (output_dir / "history.json").write_text(
        json.dumps(history, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return history
