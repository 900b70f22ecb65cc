"""Finetuning and serving harness for small sequence-to-sequence summarizers."""

from __future__ import annotations

from .data import DataError, Pair, load_pairs
from .serve import MODES, make_app
from .toy import build_char_tokenizer, build_toy_model
from .train import TrainingError, TrainSettings, encode_batch, train

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "MODES",
    "Pair",
    "TrainSettings",
    "TrainingError",
    "__version__",
    "build_char_tokenizer",
    "build_toy_model",
    "encode_batch",
    "load_pairs",
    "make_app",
    "train",
]
