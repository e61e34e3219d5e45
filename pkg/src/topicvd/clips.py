"""Clip manifests, cutter command plans, transcript checks, frame selection.

Video handling stays declarative: the manifest and cut plan are text
artifacts for an external cutter, and transcript verification consumes
externally produced ASR output. Frame selection implements the baseline
heuristics (fixed-rate subsampling plus SSIM-redundancy filtering, and the
start/middle/end picker).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import SentencePair
from .errors import ManifestError
from .metrics import ssim
from .srt import Timecode


@dataclass(frozen=True)
class ClipRecord:
    """One video-subtitle pair: the row type of the corpus manifest."""

    documentary: str
    topic: str
    start: Timecode
    end: Timecode
    position: int
    score: float | None = None
    clip_path: str = ""
    source_text: str = ""
    target_text: str = ""

    def __post_init__(self):
        if not self.start < self.end:
            raise ManifestError(
                f"{self.documentary!r} position {self.position}: start {self.start} "
                f"not before end {self.end}"
            )
        if self.position < 1:
            raise ManifestError(f"{self.documentary!r}: position must be 1-based")


@dataclass(frozen=True)
class FrameImage:
    """Grayscale frame with intensities in [0, 1]."""

    pixels: np.ndarray
    timestamp: Timecode

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=float)
        if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError(f"frame must be a non-empty 2-D matrix, got shape {pixels.shape}")
        if not np.isfinite(pixels).all():
            raise ValueError("frame contains non-finite intensities")
        if pixels.min() < 0.0 or pixels.max() > 1.0:
            raise ValueError("frame intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", pixels)


def build_manifest(pairs: list[SentencePair]) -> list[ClipRecord]:
    """One ClipRecord per pair, carrying the pair's position within the video."""
    records: list[ClipRecord] = []
    seen: set[tuple[str, int]] = set()
    last_position: dict[str, int] = {}
    last_start: dict[str, int] = {}
    for pair in pairs:
        key = (pair.documentary, pair.position)
        if key in seen:
            raise ManifestError(f"duplicate (documentary, position) {key}")
        seen.add(key)
        if pair.position <= last_position.get(pair.documentary, 0):
            raise ManifestError(
                f"{pair.documentary!r}: positions out of order at {pair.position}"
            )
        if pair.source.start.millis < last_start.get(pair.documentary, 0):
            raise ManifestError(
                f"{pair.documentary!r}: start times regress at position {pair.position}"
            )
        last_position[pair.documentary] = pair.position
        last_start[pair.documentary] = pair.source.start.millis
        records.append(
            ClipRecord(
                documentary=pair.documentary,
                topic=pair.topic,
                start=pair.source.start,
                end=pair.source.end,
                position=pair.position,
                score=pair.score,
                clip_path=f"{pair.documentary}/{pair.position}.mp4",
                source_text=pair.source.text,
                target_text=pair.target.text,
            )
        )
    return records


def emit_cut_plan(manifest: list[ClipRecord]) -> str:
    """Declarative cut plan: input TAB start TAB end TAB output, one per record.

    This never invokes the cutter; feed the plan to ffmpeg or similar.
    """
    lines = [
        f"{rec.documentary}\t{rec.start}\t{rec.end}\t{rec.clip_path}" for rec in manifest
    ]
    return "\n".join(lines) + "\n" if lines else ""


MANIFEST_COLUMNS = ("Title", "Topic", "Start", "End", "Position", "Score", "clip_path")
CORPUS_COLUMNS = MANIFEST_COLUMNS + ("Source", "Target")


def write_manifest(records: list[ClipRecord], path: str | Path, texts: bool = True):
    """Write records as TSV with the corpus columns (texts optional)."""
    columns = CORPUS_COLUMNS if texts else MANIFEST_COLUMNS
    lines = ["\t".join(columns)]
    for rec in records:
        row = [
            rec.documentary,
            rec.topic,
            str(rec.start),
            str(rec.end),
            str(rec.position),
            "" if rec.score is None else f"{rec.score:.2f}",
            rec.clip_path,
        ]
        if texts:
            row += [rec.source_text, rec.target_text]
        lines.append("\t".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> list[ClipRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") not in (list(MANIFEST_COLUMNS), list(CORPUS_COLUMNS)):
        raise ManifestError(f"{path}: missing manifest header")
    has_texts = len(lines[0].split("\t")) == len(CORPUS_COLUMNS)
    records = []
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split("\t")
        expected = len(CORPUS_COLUMNS) if has_texts else len(MANIFEST_COLUMNS)
        if len(parts) != expected:
            raise ManifestError(f"{path}:{line_no}: expected {expected} fields")
        records.append(
            ClipRecord(
                documentary=parts[0],
                topic=parts[1],
                start=Timecode.parse(parts[2]),
                end=Timecode.parse(parts[3]),
                position=int(parts[4]),
                score=float(parts[5]) if parts[5] else None,
                clip_path=parts[6],
                source_text=parts[7] if has_texts else "",
                target_text=parts[8] if has_texts else "",
            )
        )
    return records


@dataclass(frozen=True)
class TranscriptSpan:
    start: Timecode
    end: Timecode
    text: str


@dataclass(frozen=True)
class VerifyRecord:
    documentary: str
    position: int
    distance: float | None
    flagged: bool
    reason: str = ""


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance, two-row dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def _normalize(text: str) -> str:
    return " ".join(text.casefold().split())


def verify_transcript(
    pairs: list[SentencePair],
    transcript: list[TranscriptSpan],
    threshold: float = 0.3,
) -> list[VerifyRecord]:
    """Compare each pair's source text against its best transcript span.

    The span with maximal temporal overlap (ties toward the earlier start)
    is located for each pair and the report carries the normalized
    character-level edit distance to its text, flagging pairs above
    ``threshold`` for manual review. Pairs with no overlapping span, or an
    empty transcript, are flagged ``unverifiable``.
    """
    report = []
    for pair in pairs:
        best = None
        best_key = (0, 0)
        for span in transcript:
            overlap = min(span.end.millis, pair.source.end.millis) - max(
                span.start.millis, pair.source.start.millis
            )
            key = (overlap, -span.start.millis)
            if overlap > 0 and (best is None or key > best_key):
                best, best_key = span, key
        if best is None:
            report.append(
                VerifyRecord(pair.documentary, pair.position, None, True, "unverifiable")
            )
            continue
        spoken = _normalize(best.text)
        said = _normalize(pair.source.text)
        denom = max(len(spoken), len(said), 1)
        distance = edit_distance(spoken, said) / denom
        flagged = distance > threshold
        report.append(
            VerifyRecord(
                pair.documentary,
                pair.position,
                distance,
                flagged,
                "mismatch" if flagged else "",
            )
        )
    return report


def read_transcript(path: str | Path) -> list[TranscriptSpan]:
    """Line-delimited transcript: start TAB end TAB text."""
    spans = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise ManifestError(f"{path}:{line_no}: expected start TAB end TAB text")
        spans.append(TranscriptSpan(Timecode.parse(parts[0]), Timecode.parse(parts[1]), parts[2]))
    return spans


def select_frames_heuristic(
    frames: list[FrameImage],
    rate_hz: float = 1.0,
    ssim_threshold: float = 0.5,
) -> list[FrameImage]:
    """Subsample at a fixed rate, then drop frames too similar to the last kept.

    A frame is dropped iff its SSIM with the most recently kept frame
    exceeds ``ssim_threshold``; the first subsampled frame is always kept.
    """
    if not 0.0 <= ssim_threshold <= 1.0:
        raise ValueError(f"ssim_threshold must be in [0, 1], got {ssim_threshold}")
    if rate_hz <= 0:
        raise ValueError(f"rate_hz must be positive, got {rate_hz}")
    if not frames:
        return []
    for prev, cur in zip(frames, frames[1:]):
        if cur.timestamp < prev.timestamp:
            raise ValueError("frames must be time-ordered")

    period_ms = round(1000.0 / rate_hz)
    subsampled = [frames[0]]
    next_tick = frames[0].timestamp.millis + period_ms
    for frame in frames[1:]:
        if frame.timestamp.millis >= next_tick:
            subsampled.append(frame)
            next_tick = frame.timestamp.millis + period_ms

    kept = [subsampled[0]]
    for frame in subsampled[1:]:
        if ssim(kept[-1].pixels, frame.pixels) <= ssim_threshold:
            kept.append(frame)
    return kept


def select_frames_endpoints(frames: list[FrameImage]) -> list[FrameImage]:
    """Start, middle (floor(n/2) 0-based), and end frames; duplicates when n < 3."""
    if not frames:
        raise ValueError("cannot select endpoint frames from an empty clip")
    return [frames[0], frames[len(frames) // 2], frames[-1]]
