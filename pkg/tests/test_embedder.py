"""Hash embedder behavior and the embedder factory."""

from __future__ import annotations

import numpy as np
import pytest

from longdial.embedder import HashEmbedder, HttpEmbedder, build_embedder


def test_shape_and_normalization():
    embedder = HashEmbedder(dim=64)
    vectors = embedder.encode(["the cat sat on the mat", "a completely different line"])
    assert vectors.shape == (2, 64)
    norms = np.linalg.norm(vectors, axis=1)
    assert np.allclose(norms, 1.0)


def test_empty_batch_and_empty_text():
    embedder = HashEmbedder(dim=16)
    assert embedder.encode([]).shape == (0, 16)
    vectors = embedder.encode(["", "...!!!"])
    # No tokens means a zero vector, not NaN.
    assert np.array_equal(vectors, np.zeros((2, 16)))


def test_determinism_across_instances():
    texts = ["one small step", "for a test suite"]
    a = HashEmbedder(dim=128).encode(texts)
    b = HashEmbedder(dim=128).encode(texts)
    assert np.array_equal(a, b)


def test_token_order_is_irrelevant_but_vocabulary_matters():
    embedder = HashEmbedder(dim=256)
    bag1, bag2, other = embedder.encode(
        ["alpha beta gamma", "gamma beta alpha", "delta epsilon zeta"]
    )
    assert np.array_equal(bag1, bag2)
    assert not np.array_equal(bag1, other)


def test_shared_vocabulary_raises_cosine():
    embedder = HashEmbedder(dim=256)
    a, b, c = embedder.encode(
        [
            "the casserole is burning in the oven",
            "take the casserole out of the oven now",
            "the jury returns a verdict of liable",
        ]
    )
    assert float(a @ b) > float(a @ c)


def test_case_and_punctuation_insensitive():
    embedder = HashEmbedder(dim=64)
    a, b = embedder.encode(["Hello, World!", "hello world"])
    assert np.array_equal(a, b)


def test_dim_validation():
    with pytest.raises(ValueError):
        HashEmbedder(dim=0)


def test_factory():
    mock = build_embedder({"kind": "mock-hash", "dim": 32})
    assert isinstance(mock, HashEmbedder) and mock.dim == 32
    assert isinstance(build_embedder({}), HashEmbedder)  # defaults
    http = build_embedder({"kind": "http", "url": "http://localhost:1/embed", "dim": 8})
    assert isinstance(http, HttpEmbedder) and http.dim == 8
    with pytest.raises(ValueError, match="needs a 'url'"):
        build_embedder({"kind": "http"})
    with pytest.raises(ValueError, match="unknown embedder kind"):
        build_embedder({"kind": "bert"})
