"""Within-documentary context retrieval for sentence pairs.

For a query position the retriever ranks every other sentence of the same
documentary and returns the top k, either by cosine over a vector file or by
lexical overlap when no vectors exist. Ties break toward the temporally
closer position, then the earlier one, so results are reproducible
regardless of sort internals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .clips import ClipRecord
from .errors import ContextError
from .metrics import tokenize
from .scoring import VectorStore, cosine


@dataclass(frozen=True)
class ContextMatch:
    position: int
    similarity: float
    text: str


@dataclass(frozen=True)
class ContextSet:
    documentary: str
    position: int
    language: str
    matches: tuple[ContextMatch, ...]


def lexical_similarity(a: str, b: str, language: str = "source") -> float:
    """Jaccard overlap of token sets; characters for CJK-style text."""
    lang = "zh" if language == "target" else "en"
    ta = set(tokenize(a, lang=lang, lowercase=True))
    tb = set(tokenize(b, lang=lang, lowercase=True))
    if not ta and not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def _record_text(rec: ClipRecord, language: str) -> str:
    return rec.source_text if language == "source" else rec.target_text


def retrieve_context(
    records: list[ClipRecord],
    documentary: str,
    position: int,
    k: int,
    language: str = "source",
    store: VectorStore | None = None,
    before_only: bool = False,
) -> ContextSet:
    """Rank the documentary's other sentences against one query position.

    With a vector store, similarity is cosine between stored embeddings and
    positions lacking a vector are skipped; otherwise lexical overlap on the
    record text is used. ``before_only`` restricts candidates to earlier
    positions (the streaming case where the future is unseen).
    """
    if k < 0:
        raise ContextError(f"k must be non-negative, got {k}")
    if language not in ("source", "target"):
        raise ContextError(f"unknown language {language!r}")

    doc_records = [rec for rec in records if rec.documentary == documentary]
    if not doc_records:
        raise ContextError(f"documentary {documentary!r} has no records")
    by_position = {rec.position: rec for rec in doc_records}
    if position not in by_position:
        raise ContextError(f"position {position} not found in {documentary!r}")

    query_rec = by_position[position]
    candidates = [
        rec
        for rec in doc_records
        if rec.position != position and (not before_only or rec.position < position)
    ]

    scored: list[tuple[float, int, str]] = []
    if store is not None:
        query_key = (documentary, position, language)
        if query_key not in store.vectors:
            raise ContextError(f"no vector for query {query_key}")
        query_vec = store.vectors[query_key]
        for rec in candidates:
            vec = store.vectors.get((documentary, rec.position, language))
            if vec is None:
                continue
            scored.append((cosine(query_vec, vec), rec.position, _record_text(rec, language)))
    else:
        query_text = _record_text(query_rec, language)
        for rec in candidates:
            text = _record_text(rec, language)
            scored.append((lexical_similarity(query_text, text, language), rec.position, text))

    scored.sort(key=lambda item: (-item[0], abs(item[1] - position), item[1]))
    matches = tuple(
        ContextMatch(position=pos, similarity=sim, text=text) for sim, pos, text in scored[:k]
    )
    return ContextSet(documentary=documentary, position=position, language=language, matches=matches)
