"""Cosine-similarity quality estimation over external sentence embeddings.

Embeddings are produced out of process (see the sidecar tool) and exchanged
through a plain-text vector file: a ``dim=<d>`` header, then one record per
line, ``documentary<TAB>position<TAB>language<TAB>space-separated floats``.
Scores are stored on the 0-100 scale used throughout the corpus (100 x
cosine, negatives clamped to 0, two decimals) with the raw cosine retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .assembly import SentencePair
from .errors import ScoringError, VectorFileError

KNOWN_LANGUAGES = ("source", "target")

Key = tuple[str, int, str]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two equal-length non-zero vectors, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape or u.size == 0:
        raise ScoringError(f"cosine needs equal-length 1-D vectors, got {u.shape} and {v.shape}")
    if not (np.isfinite(u).all() and np.isfinite(v).all()):
        raise ScoringError("cosine input contains non-finite entries")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ScoringError("cosine undefined for a zero vector (embedding failure upstream)")
    if np.array_equal(u, v):
        return 1.0
    return max(-1.0, min(1.0, float(np.dot(u, v)) / (nu * nv)))


def qe_score(cos: float) -> float:
    """Map a cosine to the 0-100 quality-estimation scale (two decimals)."""
    return round(100.0 * max(0.0, cos), 2)


@dataclass
class VectorStore:
    """In-memory key -> embedding table backed by the vector file format."""

    dim: int
    vectors: dict[Key, np.ndarray] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add(self, documentary: str, position: int, language: str, vector: np.ndarray):
        vec = np.asarray(vector, dtype=float)
        if vec.ndim != 1 or vec.shape[0] != self.dim:
            raise VectorFileError(
                f"vector for ({documentary!r}, {position}, {language}) has length "
                f"{vec.shape}, expected {self.dim}"
            )
        if not np.isfinite(vec).all():
            raise VectorFileError(f"non-finite vector for ({documentary!r}, {position}, {language})")
        key = (documentary, position, language)
        if key in self.vectors:
            raise VectorFileError(f"duplicate vector record for {key}")
        if language not in KNOWN_LANGUAGES:
            self.warnings.append(f"unknown language tag {language!r} for {key}")
        self.vectors[key] = vec

    def get(self, documentary: str, position: int, language: str) -> np.ndarray | None:
        return self.vectors.get((documentary, position, language))

    def __len__(self) -> int:
        return len(self.vectors)


def read_vector_file(path: str | Path) -> VectorStore:
    """Load a vector file, enforcing the declared dimension on every record."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("dim="):
        raise VectorFileError(f"{path}: missing 'dim=<d>' header")
    try:
        dim = int(lines[0][4:])
        if dim <= 0:
            raise ValueError
    except ValueError:
        raise VectorFileError(f"{path}: bad dimension header {lines[0]!r}") from None
    store = VectorStore(dim=dim)
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise VectorFileError(f"{path}:{line_no}: expected 4 tab-separated fields")
        documentary, pos_text, language, blob = parts
        try:
            position = int(pos_text)
            vector = np.array([float(tok) for tok in blob.split()], dtype=float)
        except ValueError as exc:
            raise VectorFileError(f"{path}:{line_no}: {exc}") from None
        store.add(documentary, position, language, vector)
    return store


def write_vector_file(store: VectorStore, path: str | Path):
    """Write a store in the exchange format (floats round-trip to 1e-6)."""
    out = [f"dim={store.dim}"]
    for (documentary, position, language), vec in store.vectors.items():
        blob = " ".join(f"{x:.9g}" for x in vec)
        out.append(f"{documentary}\t{position}\t{language}\t{blob}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class MissingVector:
    documentary: str
    position: int
    language: str


def score_pairs(
    pairs: list[SentencePair], store: VectorStore
) -> tuple[list[SentencePair], list[MissingVector]]:
    """Fill in QE scores from the vector store, preserving input order.

    Pairs whose source or target vector is absent pass through unscored and
    are listed in the missing-vector report.
    """
    scored: list[SentencePair] = []
    missing: list[MissingVector] = []
    for pair in pairs:
        u = store.get(pair.documentary, pair.position, "source")
        v = store.get(pair.documentary, pair.position, "target")
        absent = [lang for lang, vec in (("source", u), ("target", v)) if vec is None]
        if absent:
            missing.extend(MissingVector(pair.documentary, pair.position, lang) for lang in absent)
            scored.append(pair)
            continue
        cos = cosine(u, v)
        scored.append(replace(pair, score=qe_score(cos), cosine=cos))
    return scored, missing


def filter_by_score(
    pairs: list[SentencePair], threshold: float
) -> tuple[list[SentencePair], list[SentencePair]]:
    """Partition scored pairs into (kept, dropped) at ``score >= threshold``."""
    if not math.isfinite(threshold):
        raise ScoringError(f"threshold must be finite, got {threshold!r}")
    kept: list[SentencePair] = []
    dropped: list[SentencePair] = []
    for pair in pairs:
        if pair.score is None:
            raise ScoringError(
                f"unscored pair ({pair.documentary!r}, position {pair.position}) in filter"
            )
        (kept if pair.score >= threshold else dropped).append(pair)
    return kept, dropped
