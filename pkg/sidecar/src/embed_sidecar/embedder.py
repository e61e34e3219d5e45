"""Embedding backends for the pair-embedding CLI.

The default backend wraps a multilingual paraphrase sentence-transformer.
The ``hash-ngram`` backend is a dependency-free stand-in that buckets
character trigrams with signed feature hashing; it needs no model download,
which makes it the workhorse for tests and offline runs.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_MODEL = "sentence-transformers/paraphrase-multilingual-mpnet-base-v2"
DEFAULT_HASH_DIM = 256


class EmbedderError(Exception):
    """Bad backend spec, or a model that refuses to load."""


class HashNgramEmbedder:
    """Deterministic character-trigram feature hashing.

    Text is casefolded and padded with ``##`` on both ends so even empty or
    one-character inputs yield trigrams. Each trigram lands in a
    sha256-chosen bucket with a sha256-chosen sign; rows are L2 normalized.
    Identical texts therefore map to identical unit vectors.
    """

    def __init__(self, dim: int = DEFAULT_HASH_DIM):
        if dim < 1:
            raise EmbedderError(f"embedding dimension must be positive, got {dim}")
        self.dim = dim

    def embed(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for row, text in enumerate(texts):
            padded = f"##{text.casefold()}##"
            for i in range(len(padded) - 2):
                digest = hashlib.sha256(padded[i : i + 3].encode("utf-8")).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dim
                out[row, bucket] += 1.0 if digest[4] % 2 == 0 else -1.0
        norms = np.linalg.norm(out, axis=1, keepdims=True)
        # opposite-sign collisions can cancel a whole row; leave those as zeros
        np.divide(out, norms, out=out, where=norms > 0)
        return out


class SentenceTransformerEmbedder:
    """Wraps a sentence-transformers model; the import is deferred so the
    package works without the dependency when only hash-ngram is used."""

    def __init__(self, model_name: str, batch_size: int = 32):
        self.model_name = model_name
        self.batch_size = batch_size
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EmbedderError(
                f"sentence-transformers is not installed, cannot load {model_name!r}: {exc}"
            ) from None
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:
            raise EmbedderError(f"failed to load model {model_name!r}: {exc}") from None
        dim = self._model.get_sentence_embedding_dimension()
        if not dim:
            dim = self._model.encode(["probe"], convert_to_numpy=True).shape[1]
        self.dim = int(dim)

    def embed(self, texts: list[str]) -> np.ndarray:
        return np.asarray(
            self._model.encode(
                texts,
                batch_size=self.batch_size,
                normalize_embeddings=True,
                convert_to_numpy=True,
            ),
            dtype=float,
        )


def load_embedder(spec: str, batch_size: int = 32):
    """Build the backend named by ``spec``.

    ``hash-ngram`` or ``hash-ngram:<dim>`` select the offline backend; any
    other value is treated as a sentence-transformers model name.
    """
    if spec == "hash-ngram":
        return HashNgramEmbedder()
    if spec.startswith("hash-ngram:"):
        tail = spec.split(":", 1)[1]
        try:
            dim = int(tail)
        except ValueError:
            raise EmbedderError(f"bad hash-ngram dimension {tail!r}") from None
        return HashNgramEmbedder(dim)
    return SentenceTransformerEmbedder(spec, batch_size=batch_size)
