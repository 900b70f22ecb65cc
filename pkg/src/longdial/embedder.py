"""Text embedding backends behind a single batch interface.

Two implementations: a deterministic feature-hashing embedder that needs no
model or network and keeps test runs reproducible across processes, and a
client for an embedding service speaking the wire format
``{"texts": [...]}`` -> ``{"vectors": [[...], ...]}``.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol

import numpy as np
import requests

from ._net import post_json_with_retry

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmbeddingError(RuntimeError):
    """An embedding backend failed or returned malformed vectors."""


class Embedder(Protocol):
    dim: int

    def encode(self, texts: list[str]) -> np.ndarray:
        """Embed a batch of texts into an array of shape (len(texts), dim)."""
        ...


class HashEmbedder:
    """Feature-hashed unigram counts, L2-normalized.

    Each lowercase alphanumeric token is bucketed by its blake2b digest, so
    vectors depend only on the text and the dimension: no model download,
    no process-level hash randomization. Texts sharing vocabulary land in
    shared buckets, which is enough signal for topic-shift detection on
    test corpora.
    """

    def __init__(self, dim: int = 256) -> None:
        if dim < 1:
            raise ValueError(f"embedding dim must be >= 1, got {dim}")
        self.dim = dim

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            for token in _TOKEN_RE.findall(text.lower()):
                vectors[row, self._bucket(token)] += 1.0
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        # All-punctuation or empty texts stay zero vectors.
        np.divide(vectors, norms, out=vectors, where=norms > 0)
        return vectors


class HttpEmbedder:
    """Client for an embedding service.

    POSTs the whole batch in one request. `dim`, when given, is enforced
    against the response; otherwise it is learned from the first call.
    """

    def __init__(
        self,
        url: str,
        dim: int | None = None,
        timeout: float = 30.0,
        max_attempts: int = 5,
        session: requests.Session | None = None,
    ) -> None:
        if not url:
            raise ValueError("embedding service url must be non-empty")
        self.url = url
        self.dim = dim if dim is not None else 0
        self._timeout = timeout
        self._max_attempts = max_attempts
        self._session = session or requests.Session()

    def encode(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim or 0), dtype=np.float64)
        body = post_json_with_retry(
            self._session,
            self.url,
            {"texts": list(texts)},
            timeout=self._timeout,
            max_attempts=self._max_attempts,
            error_cls=EmbeddingError,
        )
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EmbeddingError(
                f"{self.url}: expected {len(texts)} vectors, "
                f"got {len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
            )
        try:
            array = np.asarray(vectors, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise EmbeddingError(f"{self.url}: non-numeric vectors: {exc}") from None
        if array.ndim != 2:
            raise EmbeddingError(f"{self.url}: vectors are not a 2-d batch")
        if self.dim and array.shape[1] != self.dim:
            raise EmbeddingError(
                f"{self.url}: expected dim {self.dim}, got {array.shape[1]}"
            )
        if not self.dim:
            self.dim = int(array.shape[1])
        return array


def build_embedder(config: dict) -> Embedder:
    """Construct an embedder from its config block.

    Recognized kinds: "mock-hash" (options: dim) and "http" (options: url,
    dim, timeout, max_attempts).
    """
    kind = config.get("kind", "mock-hash")
    if kind == "mock-hash":
        return HashEmbedder(dim=int(config.get("dim", 256)))
    if kind == "http":
        url = config.get("url")
        if not url:
            raise ValueError("http embedder config needs a 'url'")
        dim = config.get("dim")
        return HttpEmbedder(
            url=url,
            dim=int(dim) if dim is not None else None,
            timeout=float(config.get("timeout", 30.0)),
            max_attempts=int(config.get("max_attempts", 5)),
        )
    raise ValueError(f"unknown embedder kind {kind!r}")
