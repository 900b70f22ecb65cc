"""Self-contained toy summarizer checkpoints.

Builds a tiny randomly initialized encoder-decoder model plus a
character-level tokenizer and saves both in the standard checkpoint
layout, so the trainer and the server can be exercised end to end on
machines with no model hub access. The tokenizer maps every printable
ASCII character (plus newline and tab) to its own id and fuses them
back together on decode, so any fixture text round-trips exactly.
"""

from __future__ import annotations

import string
from pathlib import Path

import torch
from tokenizers import Tokenizer, decoders, pre_tokenizers
from tokenizers.models import WordLevel
from transformers import (
    BartConfig,
    BartForConditionalGeneration,
    PreTrainedTokenizerFast,
)

BOS, PAD, EOS, UNK = "<s>", "<pad>", "</s>", "<unk>"
_CHARS = sorted(set(string.ascii_letters + string.digits + string.punctuation + " \n\t"))


def build_char_tokenizer() -> PreTrainedTokenizerFast:
    """One token per character, decoded by plain concatenation."""
    vocab = {token: index for index, token in enumerate([BOS, PAD, EOS, UNK] + _CHARS)}
    inner = Tokenizer(WordLevel(vocab, unk_token=UNK))
    # An empty split pattern in isolated mode yields one piece per character.
    inner.pre_tokenizer = pre_tokenizers.Split(pattern="", behavior="isolated")
    # Must be set before save_pretrained so the decoder survives reload.
    inner.decoder = decoders.Fuse()
    return PreTrainedTokenizerFast(
        tokenizer_object=inner,
        bos_token=BOS,
        pad_token=PAD,
        eos_token=EOS,
        unk_token=UNK,
    )


def build_toy_model(
    save_dir: str | Path,
    seed: int = 7,
    d_model: int = 64,
    layers: int = 2,
    attention_heads: int = 2,
    ffn_dim: int = 128,
    max_positions: int = 512,
) -> Path:
    """Create and save a small random seq2seq checkpoint; returns its path.

    The same seed always produces identical weights, which keeps training
    smoke tests and served outputs reproducible.
    """
    save_dir = Path(save_dir)
    tokenizer = build_char_tokenizer()
    torch.manual_seed(seed)
    config = BartConfig(
        vocab_size=len(tokenizer),
        d_model=d_model,
        encoder_layers=layers,
        decoder_layers=layers,
        encoder_attention_heads=attention_heads,
        decoder_attention_heads=attention_heads,
        encoder_ffn_dim=ffn_dim,
        decoder_ffn_dim=ffn_dim,
        max_position_embeddings=max_positions,
        pad_token_id=tokenizer.pad_token_id,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
        decoder_start_token_id=tokenizer.eos_token_id,
        forced_eos_token_id=None,
    )
    model = BartForConditionalGeneration(config)
    save_dir.mkdir(parents=True, exist_ok=True)
    tokenizer.save_pretrained(save_dir)
    model.save_pretrained(save_dir)
    return save_dir
