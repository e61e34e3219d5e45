import os
import sys
import types

import numpy as np
import pytest

from embed_sidecar.embedder import (
    DEFAULT_HASH_DIM,
    DEFAULT_MODEL,
    EmbedderError,
    HashNgramEmbedder,
    load_embedder,
)

TEXTS = [
    "The river starts as a trickle of meltwater.",
    "河流始于一滴融水。",
    "a",
    "",
]


class TestHashNgram:
    def test_rows_are_unit_norm(self):
        vectors = HashNgramEmbedder().embed(TEXTS)
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-9)

    def test_shape_and_default_dim(self):
        vectors = HashNgramEmbedder().embed(TEXTS)
        assert vectors.shape == (len(TEXTS), DEFAULT_HASH_DIM)

    def test_deterministic_across_calls(self):
        first = HashNgramEmbedder().embed(TEXTS)
        second = HashNgramEmbedder().embed(TEXTS)
        assert np.array_equal(first, second)

    def test_identical_texts_identical_rows(self):
        vectors = HashNgramEmbedder().embed(["same text", "same text"])
        assert np.array_equal(vectors[0], vectors[1])

    def test_distinct_texts_differ(self):
        vectors = HashNgramEmbedder().embed(["one thing", "another thing entirely"])
        assert not np.array_equal(vectors[0], vectors[1])

    def test_casefolded(self):
        vectors = HashNgramEmbedder().embed(["Hello World", "hello world"])
        assert np.array_equal(vectors[0], vectors[1])

    def test_empty_and_tiny_texts_are_nonzero(self):
        # the ## padding guarantees at least two trigrams per text
        vectors = HashNgramEmbedder().embed(["", "a"])
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0)

    def test_empty_batch(self):
        vectors = HashNgramEmbedder().embed([])
        assert vectors.shape == (0, DEFAULT_HASH_DIM)

    def test_paraphrase_closer_than_mismatch(self):
        anchor, paraphrase, mismatch = HashNgramEmbedder().embed(
            [
                "the quick brown fox jumps over the lazy dog",
                "a quick brown fox leaps over a lazy dog",
                "quarterly tax filings are due in april",
            ]
        )
        assert float(anchor @ paraphrase) > float(anchor @ mismatch)

    def test_dim_must_be_positive(self):
        with pytest.raises(EmbedderError, match="positive"):
            HashNgramEmbedder(0)


class TestLoadEmbedder:
    def test_plain_spec(self):
        embedder = load_embedder("hash-ngram")
        assert isinstance(embedder, HashNgramEmbedder)
        assert embedder.dim == DEFAULT_HASH_DIM

    def test_spec_with_dim(self):
        assert load_embedder("hash-ngram:64").dim == 64

    @pytest.mark.parametrize("spec", ["hash-ngram:notanumber", "hash-ngram:", "hash-ngram:0", "hash-ngram:-3"])
    def test_bad_dim_spec(self, spec):
        with pytest.raises(EmbedderError):
            load_embedder(spec)

    def test_model_load_failure_raises(self, monkeypatch):
        fake = types.ModuleType("sentence_transformers")

        def boom(name, **kwargs):
            raise RuntimeError("no network")

        fake.SentenceTransformer = boom
        monkeypatch.setitem(sys.modules, "sentence_transformers", fake)
        with pytest.raises(EmbedderError, match="failed to load"):
            load_embedder("definitely/not-a-model")


@pytest.mark.skipif(
    "EMBED_SIDECAR_REAL_MODEL" not in os.environ,
    reason="set EMBED_SIDECAR_REAL_MODEL=1 to download and exercise the real model",
)
def test_real_model_normalizes():
    embedder = load_embedder(DEFAULT_MODEL)
    vectors = embedder.embed(["hello world", "你好世界"])
    assert vectors.shape == (2, embedder.dim)
    assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-5)
