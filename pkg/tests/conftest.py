"""Shared fixtures: synthetic tracks and the reference-shaped corpus."""

from __future__ import annotations

import random

import pytest

from topicvd.assembly import Sentence, SentencePair
from topicvd.clips import ClipRecord
from topicvd.corpus import TEST, TRAIN, VALID, CorpusManifest, SplitSpec
from topicvd.srt import SubtitleCue, SubtitleTrack, Timecode, detect_language

# Per-topic (pairs, documentaries) for each split bucket, mirroring the
# published corpus layout this toolkit reproduces. Totals: 122,930 pairs
# over 256 documentaries.
CORPUS_LAYOUT = {
    "Economy": {TRAIN: (5080, 7), VALID: (1483, 1), TEST: (1904, 1)},
    "Food": {TRAIN: (1574, 6), VALID: (705, 1), TEST: (508, 2)},
    "History": {TRAIN: (17542, 42), VALID: (1034, 1), TEST: (1047, 2)},
    "Figure": {TRAIN: (24748, 25), VALID: (1446, 2), TEST: (1307, 2)},
    "Military": {TRAIN: (2162, 3), VALID: (1036, 4), TEST: (1138, 1)},
    "Nature": {TRAIN: (26015, 90), VALID: (1474, 5), TEST: (1482, 8)},
    "Social": {TRAIN: (11415, 13), VALID: (1486, 2), TEST: (1033, 1)},
    "Technology": {TRAIN: (13966, 33), VALID: (1765, 2), TEST: (1580, 2)},
}

_WORDS = (
    "river canyon market soldier empire circuit harvest galaxy festival",
    "the camera follows a story no map has told before",
    "engineers rebuilt the ancient bridge in seventy days",
)
_TARGET_SAMPLES = ("摄影机记录下了这一切。", "他们用七十天重建古桥。", "故事从这里开始。")


def make_clip_record(
    documentary: str,
    topic: str,
    position: int,
    score: float | None = None,
    with_text: bool = True,
) -> ClipRecord:
    start = (position - 1) * 3000
    return ClipRecord(
        documentary=documentary,
        topic=topic,
        start=Timecode(start),
        end=Timecode(start + 2500),
        position=position,
        score=score,
        clip_path=f"{documentary}/{position}.mp4",
        source_text=_WORDS[position % len(_WORDS)] if with_text else "",
        target_text=_TARGET_SAMPLES[position % len(_TARGET_SAMPLES)] if with_text else "",
    )


def _bucket_records(topic: str, bucket: str, pairs: int, docs: int):
    records = []
    assignment = {}
    base, remainder = divmod(pairs, docs)
    for doc_i in range(docs):
        doc = f"{topic} {bucket} {doc_i + 1:03d}"
        assignment[doc] = bucket
        count = base + (1 if doc_i < remainder else 0)
        for position in range(1, count + 1):
            records.append(make_clip_record(doc, topic, position))
    return records, assignment


@pytest.fixture(scope="session")
def reference_corpus() -> tuple[CorpusManifest, SplitSpec]:
    """Synthetic manifest plus explicit split matching CORPUS_LAYOUT exactly."""
    records = []
    assignment = {}
    for topic, buckets in CORPUS_LAYOUT.items():
        for bucket, (pairs, docs) in buckets.items():
            bucket_records, bucket_assignment = _bucket_records(topic, bucket, pairs, docs)
            records.extend(bucket_records)
            assignment.update(bucket_assignment)
    manifest = CorpusManifest(tuple(records))
    return manifest, SplitSpec(assignment=assignment, seed=0)


def random_track(rng: random.Random, max_cues: int = 12) -> SubtitleTrack:
    """A structurally valid track with varied text, indices, gaps, languages."""
    alphabet = "abcdefghij KLMNOP.!?'\"-:123"
    cjk = "今晚我想给你们看点东西故事从这里开始"
    cues = []
    t = rng.randrange(0, 5000)
    index = 0
    for _ in range(rng.randrange(1, max_cues + 1)):
        index += rng.randrange(1, 4)
        duration = rng.randrange(200, 7000)
        lines = []
        for _ in range(rng.randrange(1, 4)):
            pool = cjk if rng.random() < 0.3 else alphabet
            text = "".join(rng.choice(pool) for _ in range(rng.randrange(1, 30))).strip()
            lines.append(text or "x")
        start, end = Timecode(t), Timecode(t + duration)
        cues.append(SubtitleCue(index, start, end, tuple(lines), detect_language(lines)))
        t += duration + rng.randrange(0, 4000)
    return SubtitleTrack(tuple(cues))


def make_sentence(text: str, start_ms: int, end_ms: int, cues=(1,), language="source") -> Sentence:
    return Sentence(
        text=text,
        start=Timecode(start_ms),
        end=Timecode(end_ms),
        member_cues=tuple(cues),
        language=language,
    )


def make_pair(
    documentary: str,
    position: int,
    start_ms: int = 0,
    end_ms: int = 2000,
    topic: str = "Nature",
    source_text: str = "a plain sentence.",
    target_text: str = "一句话。",
    score: float | None = None,
) -> SentencePair:
    return SentencePair(
        source=make_sentence(source_text, start_ms, end_ms, (position,)),
        target=make_sentence(target_text, start_ms, end_ms, (position,), language="target"),
        documentary=documentary,
        topic=topic,
        position=position,
        score=score,
    )
